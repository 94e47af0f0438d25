#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "coopmitl/errors.hpp"
#include "coopmitl/mitl.hpp"

namespace coopmitl::mitl {

bool Interval::contains(double x) const {
  const bool above = lo_open ? x > lo : x >= lo;
  const bool below = hi_open ? x < hi : x <= hi;
  return above && below;
}

bool Interval::empty() const {
  if (hi < lo) return true;
  return hi == lo && (lo_open || hi_open);
}

Interval Interval::shifted(double delta) const {
  Interval out = *this;
  out.lo = lo - delta;
  out.hi = hi - delta;
  if (out.lo < 0.0) {
    out.lo = 0.0;
    out.lo_open = false;
  }
  return out;
}

namespace {

Formula node(Kind kind, Interval interval, std::vector<Formula> children) {
  for (const auto& c : children) {
    if (!c) throw Error(ErrorCode::InvalidConfig, "null formula operand");
  }
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->interval = interval;
  n->children = std::move(children);
  return n;
}

}  // namespace

Formula make_true() {
  static const Formula t = node(Kind::True, {}, {});
  return t;
}

Formula make_false() {
  static const Formula f = node(Kind::False, {}, {});
  return f;
}

Formula make_atom(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Atom;
  n->atom = std::move(name);
  return n;
}

Formula make_not(Formula f) { return node(Kind::Not, {}, {std::move(f)}); }
Formula make_and(Formula a, Formula b) {
  return node(Kind::And, {}, {std::move(a), std::move(b)});
}
Formula make_or(Formula a, Formula b) {
  return node(Kind::Or, {}, {std::move(a), std::move(b)});
}
Formula make_next(Interval i, Formula f) { return node(Kind::Next, i, {std::move(f)}); }
Formula make_eventually(Interval i, Formula f) {
  return node(Kind::Eventually, i, {std::move(f)});
}
Formula make_always(Interval i, Formula f) { return node(Kind::Always, i, {std::move(f)}); }
Formula make_until(Interval i, Formula a, Formula b) {
  return node(Kind::Until, i, {std::move(a), std::move(b)});
}

namespace {

bool is_temporal(Kind k) {
  return k == Kind::Next || k == Kind::Eventually || k == Kind::Always || k == Kind::Until;
}

}  // namespace

bool equal(const Formula& a, const Formula& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind || a->atom != b->atom) return false;
  if (is_temporal(a->kind) && !(a->interval == b->interval)) return false;
  if (a->children.size() != b->children.size()) return false;
  for (std::size_t i = 0; i < a->children.size(); ++i) {
    if (!equal(a->children[i], b->children[i])) return false;
  }
  return true;
}

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string to_string(const Interval& i) {
  std::string s;
  s += i.lo_open ? '(' : '[';
  s += format_number(i.lo);
  s += ',';
  s += format_number(i.hi);
  s += i.hi_open ? ')' : ']';
  return s;
}

std::string to_string(const Formula& f) {
  switch (f->kind) {
    case Kind::True:
      return "true";
    case Kind::False:
      return "false";
    case Kind::Atom:
      return f->atom;
    case Kind::Not:
      return "(!" + to_string(f->children[0]) + ")";
    case Kind::And:
      return "(" + to_string(f->children[0]) + " & " + to_string(f->children[1]) + ")";
    case Kind::Or:
      return "(" + to_string(f->children[0]) + " | " + to_string(f->children[1]) + ")";
    case Kind::Next:
      return "(X" + to_string(f->interval) + " " + to_string(f->children[0]) + ")";
    case Kind::Eventually:
      return "(F" + to_string(f->interval) + " " + to_string(f->children[0]) + ")";
    case Kind::Always:
      return "(G" + to_string(f->interval) + " " + to_string(f->children[0]) + ")";
    case Kind::Until:
      return "(" + to_string(f->children[0]) + " U" + to_string(f->interval) + " " +
             to_string(f->children[1]) + ")";
  }
  return {};
}

double horizon(const Formula& f) {
  double h = 0.0;
  for (const auto& c : f->children) h = std::max(h, horizon(c));
  switch (f->kind) {
    case Kind::Next:
      // A next step looks exactly one event ahead whatever its interval.
      return h + (f->interval.bounded() ? f->interval.hi : 0.0);
    case Kind::Eventually:
    case Kind::Always:
    case Kind::Until:
      return h + f->interval.hi;
    default:
      return h;
  }
}

void TimedWord::validate() const {
  if (prefix.empty()) throw Error(ErrorCode::InvalidConfig, "timed word needs a prefix");
  if (loop.empty()) throw Error(ErrorCode::InvalidConfig, "timed word needs a loop");
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (!std::isfinite(prefix[i].time) || (i > 0 && !(prefix[i].time > prefix[i - 1].time))) {
      throw Error(ErrorCode::InvalidConfig, "prefix timestamps must strictly increase");
    }
  }
  for (const auto& e : loop) {
    if (!(e.time > 0.0) || !std::isfinite(e.time)) {
      throw Error(ErrorCode::InvalidConfig, "loop time gaps must be positive");
    }
  }
}

double TimedWord::period() const {
  double p = 0.0;
  for (const auto& e : loop) p += e.time;
  return p;
}

double TimedWord::time(std::size_t position) const {
  if (position == 0) throw Error(ErrorCode::InvalidConfig, "positions are 1-based");
  if (position <= prefix.size()) return prefix[position - 1].time;
  const std::size_t q = position - prefix.size() - 1;
  const std::size_t laps = q / loop.size();
  const std::size_t r = q % loop.size();
  double partial = 0.0;
  for (std::size_t i = 0; i <= r; ++i) partial += loop[i].time;
  return prefix.back().time + static_cast<double>(laps) * period() + partial;
}

const PropositionSet& TimedWord::symbol(std::size_t position) const {
  if (position == 0) throw Error(ErrorCode::InvalidConfig, "positions are 1-based");
  if (position <= prefix.size()) return prefix[position - 1].symbol;
  return loop[(position - prefix.size() - 1) % loop.size()].symbol;
}

}  // namespace coopmitl::mitl
