#include <algorithm>
#include <unordered_map>

#include "coopmitl/errors.hpp"
#include "coopmitl/mitl.hpp"

namespace coopmitl::mitl {

namespace {

// Positions past the prefix repeat with the loop period in both symbol and
// time gaps, so every subformula's truth is periodic there too. Tables cover
// positions 1..P+L and deeper positions fold back onto the last L entries.
class Monitor {
 public:
  explicit Monitor(const TimedWord& w)
      : w_(w), p_(w.prefix.size()), l_(w.loop.size()), n_(p_ + l_) {
    times_.reserve(n_ + 1);
    times_.push_back(0.0);
    for (std::size_t i = 1; i <= n_; ++i) times_.push_back(w.time(i));
    period_ = w.period();
  }

  const std::vector<char>& table(const Formula& f) {
    const auto it = cache_.find(f.get());
    if (it != cache_.end()) return it->second;
    std::vector<char> t = compute(f);
    return cache_.emplace(f.get(), std::move(t)).first->second;
  }

  [[nodiscard]] std::size_t fold(std::size_t k) const {
    return k <= n_ ? k : p_ + 1 + (k - p_ - 1) % l_;
  }

 private:
  static constexpr std::size_t kScanLimit = 50'000'000;

  [[nodiscard]] double time(std::size_t k) const {
    if (k <= n_) return times_[k];
    const std::size_t laps = (k - p_ - 1) / l_;
    return times_[fold(k)] + static_cast<double>(laps) * period_;
  }

  // Scan end for witnesses of an interval measured from j.
  struct Window {
    bool past_upper(double d) const {
      return interval.hi_open ? d >= interval.hi : d > interval.hi;
    }
    Interval interval;
  };

  std::vector<char> compute(const Formula& f) {
    std::vector<char> out(n_ + 1, 0);
    switch (f->kind) {
      case Kind::True:
        std::fill(out.begin() + 1, out.end(), 1);
        break;
      case Kind::False:
        break;
      case Kind::Atom:
        for (std::size_t j = 1; j <= n_; ++j) out[j] = w_.symbol(j).count(f->atom) ? 1 : 0;
        break;
      case Kind::Not: {
        const auto& a = table(f->children[0]);
        for (std::size_t j = 1; j <= n_; ++j) out[j] = !a[j];
        break;
      }
      case Kind::And: {
        const auto& a = table(f->children[0]);
        const auto& b = table(f->children[1]);
        for (std::size_t j = 1; j <= n_; ++j) out[j] = a[j] && b[j];
        break;
      }
      case Kind::Or: {
        const auto& a = table(f->children[0]);
        const auto& b = table(f->children[1]);
        for (std::size_t j = 1; j <= n_; ++j) out[j] = a[j] || b[j];
        break;
      }
      case Kind::Next: {
        const auto& a = table(f->children[0]);
        for (std::size_t j = 1; j <= n_; ++j) {
          out[j] = a[fold(j + 1)] && f->interval.contains(time(j + 1) - time(j));
        }
        break;
      }
      case Kind::Eventually: {
        const auto& a = table(f->children[0]);
        for (std::size_t j = 1; j <= n_; ++j) out[j] = search(j, f->interval, nullptr, &a);
        break;
      }
      case Kind::Always: {
        const auto& a = table(f->children[0]);
        std::vector<char> neg(a.size());
        for (std::size_t j = 1; j <= n_; ++j) neg[j] = !a[j];
        for (std::size_t j = 1; j <= n_; ++j) out[j] = !search(j, f->interval, nullptr, &neg);
        break;
      }
      case Kind::Until: {
        const auto& a = table(f->children[0]);
        const auto& b = table(f->children[1]);
        for (std::size_t j = 1; j <= n_; ++j) out[j] = search(j, f->interval, &a, &b);
        break;
      }
    }
    return out;
  }

  // Exists k >= j with t_k - t_j in I and goal at k, guard holding at every
  // m in [j, k] (no guard means true).
  bool search(std::size_t j, const Interval& interval, const std::vector<char>* guard,
              const std::vector<char>* goal) const {
    const Window window{interval};
    const double tj = time(j);
    std::size_t first_admissible = 0;
    for (std::size_t k = j;; ++k) {
      if (k - j > kScanLimit) {
        throw Error(ErrorCode::UnboundedUndecidable, "witness search exceeded its horizon");
      }
      const double d = time(k) - tj;
      if (interval.bounded() && window.past_upper(d)) return false;
      const std::size_t fk = fold(k);
      if (guard != nullptr && !(*guard)[fk]) return false;
      if (interval.contains(d)) {
        if ((*goal)[fk]) return true;
        if (first_admissible == 0) first_admissible = k;
      }
      if (!interval.bounded() && first_admissible != 0 &&
          k >= std::max(first_admissible, p_) + l_) {
        return false;
      }
    }
  }

  const TimedWord& w_;
  std::size_t p_, l_, n_;
  std::vector<double> times_;
  double period_ = 0.0;
  std::unordered_map<const Node*, std::vector<char>> cache_;
};

}  // namespace

bool satisfies(const TimedWord& w, const Formula& f, std::size_t position) {
  w.validate();
  if (position == 0) throw Error(ErrorCode::InvalidConfig, "positions are 1-based");
  Monitor m(w);
  return m.table(f)[m.fold(position)] != 0;
}

}  // namespace coopmitl::mitl
