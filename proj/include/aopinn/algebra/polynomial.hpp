#pragma once

// Sparse multivariate polynomials over a field, terms kept in descending lex order
// (variable 0 is the most significant).

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "aopinn/errors.hpp"

namespace aopinn::algebra {

using Rational = boost::multiprecision::cpp_rational;

/// Exponent vector; an empty vector is the unit monomial of the 0-variable ring.
using Monomial = std::vector<int>;

/// True if a divides b.
inline bool divides(const Monomial& a, const Monomial& b) {
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] > b[k]) return false;
  return true;
}

inline Monomial monomial_lcm(const Monomial& a, const Monomial& b) {
  Monomial m(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) m[k] = std::max(a[k], b[k]);
  return m;
}

inline Monomial monomial_mul(const Monomial& a, const Monomial& b) {
  Monomial m(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) m[k] = a[k] + b[k];
  return m;
}

/// b / a, assuming a divides b.
inline Monomial monomial_div(const Monomial& b, const Monomial& a) {
  Monomial m(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) m[k] = b[k] - a[k];
  return m;
}

inline bool coprime(const Monomial& a, const Monomial& b) {
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] > 0 && b[k] > 0) return false;
  return true;
}

inline int total_degree(const Monomial& m) {
  int d = 0;
  for (int e : m) d += e;
  return d;
}

/// Field operations beyond +, -, *, / that Polynomial needs.
template <class K>
struct FieldTraits {
  static bool is_zero(const K& k) { return k == K(0); }
  static K one() { return K(1); }
};

template <class K>
class Polynomial {
 public:
  using Coef = K;
  using Terms = std::map<Monomial, K, std::greater<Monomial>>;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  static Polynomial constant(std::size_t nvars, const K& c) {
    Polynomial p(nvars);
    p.add_term(Monomial(nvars, 0), c);
    return p;
  }

  static Polynomial variable(std::size_t nvars, std::size_t index, int power = 1) {
    if (index >= nvars) throw ValidationError("Polynomial::variable: index out of range");
    Monomial m(nvars, 0);
    m[index] = power;
    Polynomial p(nvars);
    p.add_term(m, FieldTraits<K>::one());
    return p;
  }

  static Polynomial term(const Monomial& m, const K& c) {
    Polynomial p(m.size());
    p.add_term(m, c);
    return p;
  }

  [[nodiscard]] std::size_t nvars() const { return nvars_; }
  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] std::size_t size() const { return terms_.size(); }
  [[nodiscard]] const Terms& terms() const { return terms_; }

  [[nodiscard]] bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && total_degree(terms_.begin()->first) == 0);
  }

  /// Coefficient of the unit monomial.
  [[nodiscard]] K constant_term() const {
    const auto it = terms_.find(Monomial(nvars_, 0));
    return it == terms_.end() ? K(0) : it->second;
  }

  [[nodiscard]] const Monomial& leading_monomial() const {
    if (terms_.empty()) throw DomainError("leading monomial of the zero polynomial");
    return terms_.begin()->first;
  }

  [[nodiscard]] const K& leading_coefficient() const {
    if (terms_.empty()) throw DomainError("leading coefficient of the zero polynomial");
    return terms_.begin()->second;
  }

  [[nodiscard]] K coefficient(const Monomial& m) const {
    const auto it = terms_.find(m);
    return it == terms_.end() ? K(0) : it->second;
  }

  /// Adds c*m, dropping the term if it cancels.
  void add_term(const Monomial& m, const K& c) {
    if (m.size() != nvars_) throw ValidationError("Polynomial: monomial arity mismatch");
    if (FieldTraits<K>::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second = it->second + c;
      if (FieldTraits<K>::is_zero(it->second)) terms_.erase(it);
    }
  }

  void erase(const Monomial& m) { terms_.erase(m); }

  /// this -= c * m * g, skipping the first `skip` terms of g.
  void sub_scaled(const K& c, const Monomial& m, const Polynomial& g, std::size_t skip = 0) {
    std::size_t k = 0;
    for (const auto& [gm, gc] : g.terms_) {
      if (k++ < skip) continue;
      add_term(monomial_mul(m, gm), -(c * gc));
    }
  }

  /// A 0-variable polynomial (a constant) lifted into an n-variable ring.
  [[nodiscard]] Polynomial promoted(std::size_t n) const {
    if (n == nvars_) return *this;
    if (nvars_ != 0) throw ValidationError("Polynomial: variable count mismatch");
    Polynomial p(n);
    for (const auto& [m, c] : terms_) p.add_term(Monomial(n, 0), c);
    return p;
  }

  [[nodiscard]] Polynomial scaled(const K& c) const {
    Polynomial p(nvars_);
    if (FieldTraits<K>::is_zero(c)) return p;
    for (const auto& [m, a] : terms_) p.terms_.emplace_hint(p.terms_.end(), m, a * c);
    return p;
  }

  /// c * m * this; multiplication by a monomial preserves term order.
  [[nodiscard]] Polynomial mul_term(const Monomial& m, const K& c) const {
    Polynomial p(nvars_);
    if (FieldTraits<K>::is_zero(c)) return p;
    for (const auto& [tm, a] : terms_) p.terms_.emplace_hint(p.terms_.end(), monomial_mul(m, tm), a * c);
    return p;
  }

  [[nodiscard]] int degree_in(std::size_t v) const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m[v]);
    return d;
  }

  /// Indices of variables that occur with positive exponent.
  [[nodiscard]] std::vector<std::size_t> support() const {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < nvars_; ++v)
      for (const auto& [m, c] : terms_)
        if (m[v] > 0) {
          out.push_back(v);
          break;
        }
    return out;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    const std::size_t n = std::max(a.nvars_, b.nvars_);
    Polynomial p = a.promoted(n);
    for (const auto& [m, c] : b.promoted(n).terms_) p.add_term(m, c);
    return p;
  }

  friend Polynomial operator-(const Polynomial& a) {
    Polynomial p(a.nvars_);
    for (const auto& [m, c] : a.terms_) p.terms_.emplace_hint(p.terms_.end(), m, -c);
    return p;
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    const std::size_t n = std::max(a.nvars_, b.nvars_);
    Polynomial p = a.promoted(n);
    for (const auto& [m, c] : b.promoted(n).terms_) p.add_term(m, -c);
    return p;
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    const std::size_t n = std::max(a.nvars_, b.nvars_);
    const Polynomial pa = a.promoted(n);
    const Polynomial pb = b.promoted(n);
    Polynomial p(n);
    for (const auto& [m, c] : pa.terms_)
      for (const auto& [m2, c2] : pb.terms_) p.add_term(monomial_mul(m, m2), c * c2);
    return p;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    const std::size_t n = std::max(a.nvars_, b.nvars_);
    return a.promoted(n).terms_ == b.promoted(n).terms_;
  }

 private:
  std::size_t nvars_ = 0;
  Terms terms_;
};

template <class K>
Polynomial<K> make_monic(const Polynomial<K>& p) {
  if (p.is_zero()) return p;
  return p.scaled(FieldTraits<K>::one() / p.leading_coefficient());
}

/// Full multivariate division remainder: no term of the result is divisible
/// by the leading monomial of any basis element.
template <class K>
Polynomial<K> normal_form(const Polynomial<K>& p, const std::vector<Polynomial<K>>& basis) {
  for (const auto& g : basis)
    if (g.is_zero()) throw ValidationError("normal_form: zero polynomial in basis");
  Polynomial<K> rest = p;
  Polynomial<K> rem(p.nvars());
  while (!rest.is_zero()) {
    const Monomial m = rest.leading_monomial();
    const K c = rest.leading_coefficient();
    rest.erase(m);
    const Polynomial<K>* div = nullptr;
    for (const auto& g : basis)
      if (divides(g.leading_monomial(), m)) {
        div = &g;
        break;
      }
    if (div == nullptr) {
      rem.add_term(m, c);
      continue;
    }
    rest.sub_scaled(c / div->leading_coefficient(), monomial_div(m, div->leading_monomial()), *div, 1);
  }
  return rem;
}

/// Writes a monomial as `x*y^2`; the unit monomial is the empty string.
inline std::string format_monomial(const Monomial& m, const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t v = 0; v < m.size(); ++v) {
    if (m[v] == 0) continue;
    if (!out.empty()) out += '*';
    out += names.at(v);
    if (m[v] > 1) out += '^' + std::to_string(m[v]);
  }
  return out;
}

inline std::string format_rational(const Rational& q) {
  return q.str();
}

/// Plain text form of a polynomial with rational coefficients, e.g. `x^2-1/2*y+3`.
inline std::string format_polynomial(const Polynomial<Rational>& p, const std::vector<std::string>& names) {
  if (p.is_zero()) return "0";
  std::string out;
  for (const auto& [m, c] : p.terms()) {
    const std::string mono = format_monomial(m, names);
    const Rational mag = abs(c);
    if (c < 0) out += '-';
    else if (!out.empty()) out += '+';
    if (mono.empty()) out += format_rational(mag);
    else if (mag == 1) out += mono;
    else out += format_rational(mag) + '*' + mono;
  }
  return out;
}

}  // namespace aopinn::algebra
