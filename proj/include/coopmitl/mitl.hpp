#pragma once

#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "coopmitl/partition.hpp"

namespace coopmitl::mitl {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Time interval over the non-negative reals; hi may be infinite.
struct Interval {
  double lo = 0.0;
  double hi = kInfinity;
  bool lo_open = false;
  bool hi_open = true;

  static Interval all() { return {}; }
  static Interval closed(double lo, double hi) { return {lo, hi, false, false}; }

  [[nodiscard]] bool contains(double x) const;
  [[nodiscard]] bool bounded() const { return hi < kInfinity; }
  [[nodiscard]] bool empty() const;
  [[nodiscard]] bool is_all() const { return lo == 0.0 && !lo_open && !bounded(); }
  /// {x - delta : x in I} intersected with [0, inf).
  [[nodiscard]] Interval shifted(double delta) const;

  bool operator==(const Interval&) const = default;
};

enum class Kind { True, False, Atom, Not, And, Or, Next, Eventually, Always, Until };

struct Node;
using Formula = std::shared_ptr<const Node>;

struct Node {
  Kind kind = Kind::True;
  std::string atom;              // Atom only
  Interval interval;             // temporal operators only
  std::vector<Formula> children;  // operands in source order
};

Formula make_true();
Formula make_false();
Formula make_atom(std::string name);
Formula make_not(Formula f);
Formula make_and(Formula a, Formula b);
Formula make_or(Formula a, Formula b);
Formula make_next(Interval i, Formula f);
Formula make_eventually(Interval i, Formula f);
Formula make_always(Interval i, Formula f);
Formula make_until(Interval i, Formula a, Formula b);

/// Structural equality.
bool equal(const Formula& a, const Formula& b);

/// Shortest decimal text that reads back to the same double; "inf" for infinity.
std::string format_number(double x);

std::string to_string(const Interval& i);

/// Canonical, fully parenthesized text accepted by parse().
std::string to_string(const Formula& f);

/// Largest finite interval bound summed over the formula (its time horizon),
/// or infinity if some until/eventually/always interval is unbounded.
double horizon(const Formula& f);

/// Parses the ASCII syntax: atoms, true, false, !, &, |, X, F, G, U, with
/// optional intervals such as [0,5], (2,4], [1,inf). Precedence from tightest:
/// !, then X/F/G, then &, then |, then U (right-associative).
/// Throws SyntaxError.
Formula parse(std::string_view src);

struct Event {
  PropositionSet symbol;
  double time = 0.0;  // absolute in the prefix, increment in the loop
};

/// Lasso timed word: prefix events with absolute, strictly increasing times,
/// then loop events repeated forever, each carrying its positive time gap to
/// the event before it.
struct TimedWord {
  std::vector<Event> prefix;
  std::vector<Event> loop;

  /// Throws InvalidConfig if the lasso is malformed.
  void validate() const;
  [[nodiscard]] double period() const;
  /// 1-based position, any depth into the loop.
  [[nodiscard]] double time(std::size_t position) const;
  [[nodiscard]] const PropositionSet& symbol(std::size_t position) const;
};

/// Point-wise satisfaction (w, position) |= f, position 1-based.
bool satisfies(const TimedWord& w, const Formula& f, std::size_t position = 1);

}  // namespace coopmitl::mitl
