#pragma once

// Multivariate GCD over Q and reduced fractions of polynomials, used as the
// coefficient field Q(b, e, g).

#include <span>
#include <utility>

#include "aopinn/algebra/polynomial.hpp"

namespace aopinn::algebra {

using QPoly = Polynomial<Rational>;

namespace detail {

/// Coefficient of v^d, with v's exponent set to zero.
inline QPoly coeff_in(const QPoly& p, std::size_t v, int d) {
  QPoly out(p.nvars());
  for (const auto& [m, c] : p.terms())
    if (m[v] == d) {
      Monomial r = m;
      r[v] = 0;
      out.add_term(r, c);
    }
  return out;
}

/// a / b, which must be exact.
inline QPoly exact_div(const QPoly& a, const QPoly& b) {
  QPoly rest = a;
  QPoly q(std::max(a.nvars(), b.nvars()));
  rest = rest.promoted(q.nvars());
  const QPoly d = b.promoted(q.nvars());
  while (!rest.is_zero()) {
    const Monomial m = rest.leading_monomial();
    if (!divides(d.leading_monomial(), m)) throw NumericFailure("exact_div: division is not exact");
    const Rational c = rest.leading_coefficient() / d.leading_coefficient();
    const Monomial t = monomial_div(m, d.leading_monomial());
    rest.erase(m);
    rest.sub_scaled(c, t, d, 1);
    q.add_term(t, c);
  }
  return q;
}

}  // namespace detail

inline QPoly gcd(const QPoly& a, const QPoly& b);

namespace detail {

inline QPoly content_in(const QPoly& p, std::size_t v) {
  QPoly g;
  for (int d = p.degree_in(v); d >= 0; --d) {
    const QPoly c = coeff_in(p, v, d);
    if (c.is_zero()) continue;
    g = gcd(g, c);
    if (g.is_constant()) break;
  }
  return g;
}

inline QPoly primitive_in(const QPoly& p, std::size_t v) {
  if (p.is_zero()) return p;
  return exact_div(p, content_in(p, v));
}

/// Pseudo-remainder of a by b as polynomials in v.
inline QPoly prem(const QPoly& a, const QPoly& b, std::size_t v) {
  const int db = b.degree_in(v);
  const QPoly lb = coeff_in(b, v, db);
  QPoly r = a;
  while (!r.is_zero()) {
    const int dr = r.degree_in(v);
    if (dr < db) break;
    const QPoly lr = coeff_in(r, v, dr);
    Monomial shift(r.nvars(), 0);
    shift[v] = dr - db;
    r = lb * r - lr * b.mul_term(shift, Rational(1));
  }
  return r;
}

}  // namespace detail

/// Monic greatest common divisor (recursive primitive remainder sequence).
/// gcd(0, 0) = 0.
inline QPoly gcd(const QPoly& a0, const QPoly& b0) {
  if (a0.is_zero()) return make_monic(b0);
  if (b0.is_zero()) return make_monic(a0);
  const std::size_t n = std::max(a0.nvars(), b0.nvars());
  const QPoly a = a0.promoted(n);
  const QPoly b = b0.promoted(n);
  std::size_t v = n;
  for (std::size_t k = 0; k < n && v == n; ++k)
    if (a.degree_in(k) > 0 || b.degree_in(k) > 0) v = k;
  if (v == n) return QPoly::constant(n, 1);

  if (a.degree_in(v) == 0) return gcd(a, detail::content_in(b, v));
  if (b.degree_in(v) == 0) return gcd(b, detail::content_in(a, v));

  const QPoly ca = detail::content_in(a, v);
  const QPoly cb = detail::content_in(b, v);
  QPoly p = detail::exact_div(a, ca);
  QPoly q = detail::exact_div(b, cb);
  if (p.degree_in(v) < q.degree_in(v)) std::swap(p, q);
  while (!q.is_zero()) {
    QPoly r = detail::primitive_in(detail::prem(p, q, v), v);
    p = std::move(q);
    q = std::move(r);
  }
  return make_monic(gcd(ca, cb) * detail::primitive_in(p, v));
}

/// num/den with gcd(num, den) = 1 and den monic; zero is 0/1.
class RationalFunction {
 public:
  RationalFunction() : den_(QPoly::constant(0, 1)) {}
  RationalFunction(int c) : RationalFunction(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  RationalFunction(const Rational& c)                           // NOLINT(google-explicit-constructor)
      : num_(QPoly::constant(0, c)), den_(QPoly::constant(0, 1)) {}
  explicit RationalFunction(QPoly num) : num_(std::move(num)), den_(QPoly::constant(0, 1)) {}
  RationalFunction(QPoly num, QPoly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw DomainError("RationalFunction: zero denominator");
    canonicalize();
  }

  /// The parameter with the given index in an n-parameter field.
  static RationalFunction parameter(std::size_t nparams, std::size_t index) {
    return RationalFunction(QPoly::variable(nparams, index));
  }

  [[nodiscard]] const QPoly& numerator() const { return num_; }
  [[nodiscard]] const QPoly& denominator() const { return den_; }
  [[nodiscard]] bool is_zero() const { return num_.is_zero(); }
  [[nodiscard]] bool is_constant() const { return num_.is_constant() && den_.is_constant(); }

  /// Value at a rational point; DomainError where the denominator vanishes.
  [[nodiscard]] Rational evaluate(std::span<const Rational> at) const {
    const Rational d = eval(den_, at);
    if (d == 0) throw DomainError("RationalFunction: pole at evaluation point");
    return eval(num_, at) / d;
  }

  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    if (a.den_ == b.den_) return {a.num_ + b.num_, a.den_};
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
  }
  friend RationalFunction operator-(const RationalFunction& a) {
    RationalFunction r;
    r.num_ = -a.num_;
    r.den_ = a.den_;
    return r;
  }
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    if (a.is_zero() || b.is_zero()) return {};
    return {a.num_ * b.num_, a.den_ * b.den_};
  }
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
    if (b.is_zero()) throw DomainError("RationalFunction: division by zero");
    return {a.num_ * b.den_, a.den_ * b.num_};
  }
  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

 private:
  static Rational eval(const QPoly& p, std::span<const Rational> at) {
    Rational s = 0;
    for (const auto& [m, c] : p.terms()) {
      Rational t = c;
      for (std::size_t v = 0; v < m.size(); ++v)
        for (int k = 0; k < m[v]; ++k) t *= at[v];
      s += t;
    }
    return s;
  }

  void canonicalize() {
    if (num_.is_zero()) {
      num_ = QPoly();
      den_ = QPoly::constant(0, 1);
      return;
    }
    if (!den_.is_constant()) {
      const QPoly g = gcd(num_, den_);
      if (!g.is_constant()) {
        num_ = detail::exact_div(num_, g);
        den_ = detail::exact_div(den_, g);
      }
    }
    const Rational lc = den_.leading_coefficient();
    if (lc != 1) {
      num_ = num_.scaled(Rational(1) / lc);
      den_ = den_.scaled(Rational(1) / lc);
    }
    if (num_.is_constant() && den_.is_constant()) {
      num_ = QPoly::constant(0, num_.constant_term());
      den_ = QPoly::constant(0, 1);
    }
  }

  QPoly num_;
  QPoly den_;
};

template <>
struct FieldTraits<RationalFunction> {
  static bool is_zero(const RationalFunction& k) { return k.is_zero(); }
  static RationalFunction one() { return RationalFunction(1); }
};

}  // namespace aopinn::algebra
