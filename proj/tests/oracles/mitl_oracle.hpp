#pragma once

// Naive point-wise MITL evaluator used as an oracle. It fills a truth table
// per AST node over a short unrolling of the lasso, scanning later positions
// for temporal operators. It shares nothing with the
// library monitor except the AST types.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "coopmitl/mitl.hpp"

namespace oracle {

namespace detail {

inline bool in_interval(const coopmitl::mitl::Interval& i, double d) {
  const bool above = i.lo_open ? d > i.lo : d >= i.lo;
  const bool below = i.hi_open ? d < i.hi : d <= i.hi;
  return above && below;
}

inline bool past_interval(const coopmitl::mitl::Interval& i, double d) {
  return i.hi_open ? d >= i.hi : d > i.hi;
}

}  // namespace detail

/// Truth of `f` at the first position of `w`. A truth table over the prefix
/// and two loop passes is filled per AST node; positions past the table are
/// folded back by whole loop lengths, which is exact because the suffix from
/// any loop position repeats. Temporal scans run until the interval is
/// exhausted, or for unbounded intervals one full loop past the point where
/// both the interval has opened and the word has become periodic.
inline bool brute_satisfies(const coopmitl::mitl::TimedWord& w,
                            const coopmitl::mitl::Formula& f, std::size_t loops = 2) {
  using namespace coopmitl::mitl;
  const std::size_t prefix = w.prefix.size();
  const std::size_t period = w.loop.size();
  if (loops < 2) loops = 2;
  const std::size_t n = prefix + loops * period;

  struct Eval {
    const TimedWord& w;
    std::size_t prefix;
    std::size_t period;
    std::size_t n;

    std::size_t fold(std::size_t j) const {
      return j < n ? j : n - period + (j - (n - period)) % period;
    }

    double time(std::size_t j) const { return w.time(j + 1); }  // word positions are 1-based

    const coopmitl::PropositionSet& symbol(std::size_t j) const {
      return j < prefix ? w.prefix[j].symbol : w.loop[(j - prefix) % period].symbol;
    }

    // Last position worth scanning from j for interval i.
    std::size_t horizon(std::size_t j, const Interval& i) const {
      std::size_t k = j;
      while (!(time(k) - time(j) >= i.lo)) ++k;
      return std::max(k, prefix) + period;
    }

    std::vector<char> operator()(const Formula& g) const {
      std::vector<char> out(n, 0);
      switch (g->kind) {
        case Kind::True:
          std::fill(out.begin(), out.end(), 1);
          break;
        case Kind::False:
          break;
        case Kind::Atom:
          for (std::size_t j = 0; j < n; ++j) out[j] = symbol(j).count(g->atom) ? 1 : 0;
          break;
        case Kind::Not: {
          const auto a = (*this)(g->children[0]);
          for (std::size_t j = 0; j < n; ++j) out[j] = !a[j];
          break;
        }
        case Kind::And: {
          const auto a = (*this)(g->children[0]);
          const auto b = (*this)(g->children[1]);
          for (std::size_t j = 0; j < n; ++j) out[j] = a[j] && b[j];
          break;
        }
        case Kind::Or: {
          const auto a = (*this)(g->children[0]);
          const auto b = (*this)(g->children[1]);
          for (std::size_t j = 0; j < n; ++j) out[j] = a[j] || b[j];
          break;
        }
        case Kind::Next: {
          const auto a = (*this)(g->children[0]);
          for (std::size_t j = 0; j < n; ++j) {
            out[j] = a[fold(j + 1)] && detail::in_interval(g->interval, time(j + 1) - time(j));
          }
          break;
        }
        case Kind::Eventually:
        case Kind::Always: {
          const bool always = g->kind == Kind::Always;
          const auto a = (*this)(g->children[0]);
          for (std::size_t j = 0; j < n; ++j) {
            const std::size_t last = horizon(j, g->interval);
            bool found = false;
            for (std::size_t k = j;; ++k) {
              const double d = time(k) - time(j);
              if (detail::past_interval(g->interval, d)) break;
              if (g->interval.hi == coopmitl::mitl::kInfinity && k > last) break;
              if (detail::in_interval(g->interval, d) && (always ? !a[fold(k)] : a[fold(k)])) {
                found = true;
                break;
              }
            }
            out[j] = always ? !found : found;
          }
          break;
        }
        case Kind::Until: {
          const auto a = (*this)(g->children[0]);
          const auto b = (*this)(g->children[1]);
          for (std::size_t j = 0; j < n; ++j) {
            const std::size_t last = horizon(j, g->interval);
            for (std::size_t k = j;; ++k) {
              const double d = time(k) - time(j);
              if (detail::past_interval(g->interval, d)) break;
              if (g->interval.hi == coopmitl::mitl::kInfinity && k > last) break;
              if (!a[fold(k)]) break;
              if (detail::in_interval(g->interval, d) && b[fold(k)]) {
                out[j] = 1;
                break;
              }
            }
          }
          break;
        }
      }
      return out;
    }
  };
  return Eval{w, prefix, period, n}(f)[0] != 0;
}

}  // namespace oracle
