#include "coopmitl/progression.hpp"

#include <algorithm>

#include "coopmitl/errors.hpp"

namespace coopmitl::plan {

using mitl::Formula;
using mitl::Interval;
using mitl::Kind;

namespace {

void collect(const Formula& f, Kind kind, std::vector<Formula>& out) {
  if (f->kind == kind) {
    for (const auto& c : f->children) collect(c, kind, out);
  } else {
    out.push_back(f);
  }
}

Formula combine(Kind kind, std::vector<Formula> operands) {
  const bool is_and = kind == Kind::And;
  const Kind absorbing = is_and ? Kind::False : Kind::True;
  const Kind neutral = is_and ? Kind::True : Kind::False;

  std::vector<Formula> flat;
  for (const auto& f : operands) collect(f, kind, flat);

  std::vector<std::pair<std::string, Formula>> keyed;
  for (const auto& f : flat) {
    if (f->kind == absorbing) return f;
    if (f->kind == neutral) continue;
    keyed.emplace_back(mitl::to_string(f), f);
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  keyed.erase(std::unique(keyed.begin(), keyed.end(),
                          [](const auto& a, const auto& b) { return a.first == b.first; }),
              keyed.end());
  if (keyed.empty()) return is_and ? mitl::make_true() : mitl::make_false();
  Formula acc = keyed.front().second;
  for (std::size_t i = 1; i < keyed.size(); ++i) {
    acc = is_and ? mitl::make_and(acc, keyed[i].second) : mitl::make_or(acc, keyed[i].second);
  }
  return acc;
}

Formula negate(const Formula& f) {
  switch (f->kind) {
    case Kind::True: return mitl::make_false();
    case Kind::False: return mitl::make_true();
    case Kind::Not: return f->children[0];
    default: return mitl::make_not(f);
  }
}

Formula eventually(const Interval& i, const Formula& body) {
  if (i.empty() || body->kind == Kind::False) return mitl::make_false();
  return mitl::make_eventually(i, body);
}

Formula always(const Interval& i, const Formula& body) {
  if (i.empty() || body->kind == Kind::True) return mitl::make_true();
  return mitl::make_always(i, body);
}

Formula until(const Interval& i, const Formula& lhs, const Formula& rhs) {
  if (i.empty() || rhs->kind == Kind::False || lhs->kind == Kind::False) {
    return mitl::make_false();
  }
  return mitl::make_until(i, lhs, rhs);
}

}  // namespace

Formula simplify(const Formula& f) {
  switch (f->kind) {
    case Kind::True:
    case Kind::False:
    case Kind::Atom:
      return f;
    case Kind::Not:
      return negate(simplify(f->children[0]));
    case Kind::And:
    case Kind::Or:
      return combine(f->kind, {simplify(f->children[0]), simplify(f->children[1])});
    case Kind::Next: {
      Formula body = simplify(f->children[0]);
      if (f->interval.empty() || body->kind == Kind::False) return mitl::make_false();
      return mitl::make_next(f->interval, body);
    }
    case Kind::Eventually:
      return eventually(f->interval, simplify(f->children[0]));
    case Kind::Always:
      return always(f->interval, simplify(f->children[0]));
    case Kind::Until:
      return until(f->interval, simplify(f->children[0]), simplify(f->children[1]));
  }
  return f;
}

namespace {

Formula step(const Formula& f, const PropositionSet& symbol, double delta) {
  switch (f->kind) {
    case Kind::True:
    case Kind::False:
      return f;
    case Kind::Atom:
      return symbol.count(f->atom) ? mitl::make_true() : mitl::make_false();
    case Kind::Not:
      return negate(step(f->children[0], symbol, delta));
    case Kind::And:
    case Kind::Or:
      return combine(f->kind, {step(f->children[0], symbol, delta),
                               step(f->children[1], symbol, delta)});
    case Kind::Next:
      return f->interval.contains(delta) ? f->children[0] : mitl::make_false();
    case Kind::Eventually: {
      const Formula& body = f->children[0];
      const Formula now =
          f->interval.contains(0.0) ? step(body, symbol, delta) : mitl::make_false();
      return combine(Kind::Or, {now, eventually(f->interval.shifted(delta), body)});
    }
    case Kind::Always: {
      const Formula& body = f->children[0];
      const Formula now =
          f->interval.contains(0.0) ? step(body, symbol, delta) : mitl::make_true();
      return combine(Kind::And, {now, always(f->interval.shifted(delta), body)});
    }
    case Kind::Until: {
      const Formula& lhs = f->children[0];
      const Formula& rhs = f->children[1];
      const Formula now =
          f->interval.contains(0.0) ? step(rhs, symbol, delta) : mitl::make_false();
      return combine(Kind::And,
                     {step(lhs, symbol, delta),
                      combine(Kind::Or, {now, until(f->interval.shifted(delta), lhs, rhs)})});
    }
  }
  return f;
}

}  // namespace

Formula progress(const Formula& f, const PropositionSet& symbol, double delta) {
  if (!(delta > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "progression needs a positive time step");
  }
  return simplify(step(f, symbol, delta));
}

bool is_bounded(const Formula& f) {
  switch (f->kind) {
    case Kind::Eventually:
    case Kind::Always:
    case Kind::Until:
      if (!f->interval.bounded()) return false;
      break;
    default:
      break;
  }
  return std::all_of(f->children.begin(), f->children.end(),
                     [](const Formula& c) { return is_bounded(c); });
}

bool in_fragment(const Formula& f, std::string* reason) {
  std::vector<Formula> conjuncts;
  collect(f, Kind::And, conjuncts);
  for (const auto& c : conjuncts) {
    if (is_bounded(c)) continue;
    if (c->kind == Kind::Always && !c->interval.bounded() && is_bounded(c->children[0])) {
      continue;
    }
    if (reason != nullptr) {
      *reason = "subformula " + mitl::to_string(c) +
                " has an unbounded interval outside a top-level G[a,inf)";
    }
    return false;
  }
  return true;
}

void require_fragment(const Formula& f) {
  std::string reason;
  if (!in_fragment(f, &reason)) throw Error(ErrorCode::UnsupportedFragment, reason);
}

}  // namespace coopmitl::plan
