#pragma once

// Parser for polynomial text such as `d2S + S*d1I*b - 2*d1S^2`.
// Grammar: sums and differences of products of integers, names, powers
// (`^` with an integer exponent) and parenthesized expressions.

#include <cctype>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "aopinn/algebra/ratfun.hpp"

namespace aopinn::algebra {

/// Ring variables and (for rational-function coefficients) parameter names.
struct RingNames {
  std::vector<std::string> variables;
  std::vector<std::string> parameters;
};

template <class K>
class PolynomialParser {
 public:
  PolynomialParser(std::string_view text, const RingNames& names) : text_(text), names_(names) {}

  Polynomial<K> parse() {
    Polynomial<K> p = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("polynomial parse error at offset " + std::to_string(pos_) + ": " + what + " in \"" +
                          std::string(text_) + "\"");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::size_t nvars() const { return names_.variables.size(); }

  Polynomial<K> expr() {
    Polynomial<K> p = product();
    for (;;) {
      if (accept('+')) p = p + product();
      else if (accept('-')) p = p - product();
      else return p;
    }
  }

  Polynomial<K> product() {
    Polynomial<K> p = unary();
    while (accept('*')) p = p * unary();
    return p;
  }

  Polynomial<K> unary() {
    if (accept('-')) return -unary();
    Polynomial<K> base = atom();
    if (!accept('^')) return base;
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected exponent");
    const int e = std::stoi(std::string(text_.substr(start, pos_ - start)));
    Polynomial<K> p = Polynomial<K>::constant(nvars(), FieldTraits<K>::one());
    for (int k = 0; k < e; ++k) p = p * base;
    return p;
  }

  Polynomial<K> atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (accept('(')) {
      Polynomial<K> p = expr();
      if (!accept(')')) fail("expected ')'");
      return p;
    }
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return Polynomial<K>::constant(nvars(), K(Rational(std::string(text_.substr(start, pos_ - start)))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string name(text_.substr(start, pos_ - start));
      for (std::size_t v = 0; v < nvars(); ++v)
        if (names_.variables[v] == name) return Polynomial<K>::variable(nvars(), v);
      for (std::size_t k = 0; k < names_.parameters.size(); ++k)
        if (names_.parameters[k] == name) {
          if constexpr (std::is_same_v<K, RationalFunction>)
            return Polynomial<K>::constant(nvars(), RationalFunction::parameter(names_.parameters.size(), k));
          else
            fail("parameters need rational-function coefficients");
        }
      pos_ = start;
      fail("unknown name '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  const RingNames& names_;
  std::size_t pos_ = 0;
};

template <class K>
Polynomial<K> parse_polynomial(std::string_view text, const RingNames& names) {
  return PolynomialParser<K>(text, names).parse();
}

}  // namespace aopinn::algebra
