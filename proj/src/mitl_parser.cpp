#include <cctype>
#include <charconv>
#include <cmath>

#include "coopmitl/errors.hpp"
#include "coopmitl/mitl.hpp"

namespace coopmitl::mitl {

namespace {

enum class Tok {
  End, Ident, Number, Inf, True, False, Not, And, Or, Next, Eventually, Always, Until,
  LParen, RParen, LBracket, RBracket, Comma,
};

struct Token {
  Tok kind = Tok::End;
  std::size_t offset = 0;
  std::string_view text;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) { advance(); }

  Formula parse_all() {
    Formula f = parse_until();
    if (tok_.kind != Tok::End) fail({"'&'", "'|'", "'U'", "end of input"}, "unexpected token");
    return f;
  }

 private:
  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& message) const {
    throw SyntaxError(tok_.offset, std::move(expected), message);
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  void advance() {
    skip_space();
    tok_.offset = pos_;
    if (pos_ >= src_.size()) {
      tok_.kind = Tok::End;
      tok_.text = {};
      return;
    }
    const char c = src_[pos_];
    const auto single = [&](Tok k) {
      tok_.kind = k;
      tok_.text = src_.substr(pos_, 1);
      ++pos_;
    };
    switch (c) {
      case '!': return single(Tok::Not);
      case '&': return single(Tok::And);
      case '|': return single(Tok::Or);
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case '[': return single(Tok::LBracket);
      case ']': return single(Tok::RBracket);
      case ',': return single(Tok::Comma);
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t end = pos_;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '.' ||
              ((src_[end] == '+' || src_[end] == '-') && end > pos_ &&
               (src_[end - 1] == 'e' || src_[end - 1] == 'E')))) {
        ++end;
      }
      tok_.kind = Tok::Number;
      tok_.text = src_.substr(pos_, end - pos_);
      pos_ = end;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) {
        ++end;
      }
      tok_.text = src_.substr(pos_, end - pos_);
      pos_ = end;
      if (tok_.text == "X") tok_.kind = Tok::Next;
      else if (tok_.text == "F") tok_.kind = Tok::Eventually;
      else if (tok_.text == "G") tok_.kind = Tok::Always;
      else if (tok_.text == "U") tok_.kind = Tok::Until;
      else if (tok_.text == "true") tok_.kind = Tok::True;
      else if (tok_.text == "false") tok_.kind = Tok::False;
      else if (tok_.text == "inf") tok_.kind = Tok::Inf;
      else tok_.kind = Tok::Ident;
      return;
    }
    throw SyntaxError(pos_, {"formula"}, std::string("unexpected character '") + c + "'");
  }

  // True when the current '(' opens an interval rather than a subformula.
  [[nodiscard]] bool paren_starts_interval() const {
    std::size_t p = pos_;
    while (p < src_.size() && std::isspace(static_cast<unsigned char>(src_[p]))) ++p;
    return p < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[p])) || src_[p] == '.');
  }

  double parse_number() {
    if (tok_.kind != Tok::Number) fail({"number"}, "expected an interval bound");
    double value = 0.0;
    const char* first = tok_.text.data();
    const char* last = first + tok_.text.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last || !std::isfinite(value)) {
      fail({"number"}, "malformed number '" + std::string(tok_.text) + "'");
    }
    advance();
    return value;
  }

  Interval parse_optional_interval() {
    const bool bracket = tok_.kind == Tok::LBracket;
    const bool paren = tok_.kind == Tok::LParen && paren_starts_interval();
    if (!bracket && !paren) return Interval::all();
    const std::size_t start = tok_.offset;
    Interval i;
    i.lo_open = paren;
    advance();
    if (tok_.kind == Tok::Inf) fail({"number"}, "interval lower bound must be finite");
    i.lo = parse_number();
    if (tok_.kind != Tok::Comma) fail({"','"}, "expected ',' in interval");
    advance();
    if (tok_.kind == Tok::Inf) {
      i.hi = kInfinity;
      advance();
      if (tok_.kind != Tok::RParen) fail({"')'"}, "an infinite upper bound must be open");
      i.hi_open = true;
    } else {
      i.hi = parse_number();
      if (tok_.kind == Tok::RBracket) i.hi_open = false;
      else if (tok_.kind == Tok::RParen) i.hi_open = true;
      else fail({"']'", "')'"}, "expected interval close");
    }
    if (!(i.hi > i.lo)) {
      throw SyntaxError(start, {"interval with upper bound > lower bound"},
                        "empty or reversed interval " + to_string(i) +
                            " (upper bound must exceed lower bound)");
    }
    advance();
    return i;
  }

  Formula parse_until() {
    Formula lhs = parse_or();
    if (tok_.kind == Tok::Until) {
      advance();
      const Interval i = parse_optional_interval();
      Formula rhs = parse_until();
      return make_until(i, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Formula parse_or() {
    Formula lhs = parse_and();
    while (tok_.kind == Tok::Or) {
      advance();
      lhs = make_or(std::move(lhs), parse_and());
    }
    return lhs;
  }

  Formula parse_and() {
    Formula lhs = parse_unary();
    while (tok_.kind == Tok::And) {
      advance();
      lhs = make_and(std::move(lhs), parse_unary());
    }
    return lhs;
  }

  Formula parse_unary() {
    switch (tok_.kind) {
      case Tok::Not:
        advance();
        return make_not(parse_unary());
      case Tok::Next:
      case Tok::Eventually:
      case Tok::Always: {
        const Tok op = tok_.kind;
        advance();
        const Interval i = parse_optional_interval();
        Formula body = parse_unary();
        if (op == Tok::Next) return make_next(i, std::move(body));
        if (op == Tok::Eventually) return make_eventually(i, std::move(body));
        return make_always(i, std::move(body));
      }
      default:
        return parse_primary();
    }
  }

  Formula parse_primary() {
    switch (tok_.kind) {
      case Tok::True:
        advance();
        return make_true();
      case Tok::False:
        advance();
        return make_false();
      case Tok::Ident: {
        std::string name(tok_.text);
        advance();
        return make_atom(std::move(name));
      }
      case Tok::LParen: {
        advance();
        Formula inner = parse_until();
        if (tok_.kind != Tok::RParen) fail({"')'", "'&'", "'|'", "'U'"}, "unbalanced parenthesis");
        advance();
        return inner;
      }
      default:
        fail({"identifier", "'true'", "'false'", "'('", "'!'", "'X'", "'F'", "'G'"},
             tok_.kind == Tok::End ? "unexpected end of input" : "unexpected token '" +
                                                                      std::string(tok_.text) + "'");
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token tok_;
};

}  // namespace

Formula parse(std::string_view src) { return Parser(src).parse_all(); }

}  // namespace coopmitl::mitl
