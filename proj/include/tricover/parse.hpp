#pragma once

// Reader for the textual polynomial syntax produced by Poly::to_string.
// Grammar: expr := term (('+'|'-') term)*, term := factor (('*'|'/') factor)*,
// factor := ('-')? base ('^' integer)?, base := number | name | '(' expr ')'.
// Division is only allowed by constants.

#include "tricover/ratfun.hpp"

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace tricover {

namespace detail {

class PolyParser {
public:
  PolyParser(std::string_view text, const std::vector<std::string>& names)
      : text_(text), names_(names), nvars_(static_cast<int>(names.size())) {}

  Poly parse() {
    Poly p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character");
    return p;
  }

private:
  [[noreturn]] void fail(const std::string& what) const {
    throw AlgebraError("polynomial syntax error at column " + std::to_string(pos_ + 1) + ": " +
                       what + " in '" + std::string(text_) + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Poly expr() {
    Poly acc = term();
    while (true) {
      if (accept('+')) acc += term();
      else if (accept('-')) acc -= term();
      else return acc;
    }
  }

  Poly term() {
    Poly acc = factor();
    while (true) {
      if (accept('*')) {
        acc *= factor();
      } else if (accept('/')) {
        Poly d = factor();
        if (!d.is_constant() || d.is_zero()) fail("division by a non-constant");
        acc *= 1 / d.constant_term();
      } else {
        return acc;
      }
    }
  }

  Poly factor() {
    if (accept('-')) return -factor();
    Poly b = base();
    if (accept('^')) {
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected exponent");
      b = b.pow(static_cast<unsigned>(std::stoul(std::string(text_.substr(start, pos_ - start)))));
    }
    return b;
  }

  Poly base() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Poly p = expr();
      if (!accept(')')) fail("expected ')'");
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      Rational r(mpz_class(std::string(text_.substr(start, pos_ - start))));
      return Poly::constant(r, nvars_);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string_view name = text_.substr(start, pos_ - start);
      for (int i = 0; i < nvars_; ++i)
        if (names_[i] == name) return Poly::variable(i, nvars_);
      pos_ = start;
      fail("unknown variable '" + std::string(name) + "'");
    }
    fail("unexpected character");
  }

  std::string_view text_;
  const std::vector<std::string>& names_;
  int nvars_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Poly parse_poly(std::string_view text, const std::vector<std::string>& names = {"x", "y"}) {
  return detail::PolyParser(text, names).parse();
}

/// Reads "(num)/(den)" or a bare polynomial, as written by RatFun::to_string.
inline RatFun parse_ratfun(std::string_view text, const std::vector<std::string>& names = {"x", "y"}) {
  // A top-level ")/(" splits numerator and denominator.
  int depth = 0;
  for (std::size_t i = 0; i + 2 < text.size(); ++i) {
    if (text[i] == '(') ++depth;
    if (text[i] == ')') --depth;
    if (depth == 0 && text[i] == ')' && text[i + 1] == '/' && text[i + 2] == '(') {
      return RatFun(parse_poly(text.substr(0, i + 1), names), parse_poly(text.substr(i + 2), names));
    }
  }
  return RatFun(parse_poly(text, names));
}

}  // namespace tricover
