#pragma once

#include <cmath>
#include <ostream>
#include <type_traits>

namespace aopinn::diffkit {

/// Forward-mode dual number carrying d/dt of a scalar computation.
///
/// Only the primitives a PINN needs are provided (+, -, *, /, tanh, square);
/// any other function applied to a Dual fails to compile.
template <class T = double>
struct Dual {
  T value{};
  T deriv{};

  constexpr Dual() = default;
  constexpr Dual(T v) : value(v), deriv(0) {}  // NOLINT: constants promote implicitly
  constexpr Dual(T v, T d) : value(v), deriv(d) {}

  static constexpr Dual variable(T v) { return {v, T(1)}; }

  constexpr Dual& operator+=(const Dual& o) {
    value += o.value;
    deriv += o.deriv;
    return *this;
  }
  constexpr Dual& operator-=(const Dual& o) {
    value -= o.value;
    deriv -= o.deriv;
    return *this;
  }
  constexpr Dual& operator*=(const Dual& o) {
    deriv = deriv * o.value + value * o.deriv;
    value *= o.value;
    return *this;
  }
  constexpr Dual& operator/=(const Dual& o) {
    value /= o.value;
    deriv = (deriv - value * o.deriv) / o.value;
    return *this;
  }
};

template <class T> constexpr Dual<T> operator-(const Dual<T>& a) { return {-a.value, -a.deriv}; }
template <class T> constexpr Dual<T> operator+(Dual<T> a, const Dual<T>& b) { return a += b; }
template <class T> constexpr Dual<T> operator-(Dual<T> a, const Dual<T>& b) { return a -= b; }
template <class T> constexpr Dual<T> operator*(Dual<T> a, const Dual<T>& b) { return a *= b; }
template <class T> constexpr Dual<T> operator/(Dual<T> a, const Dual<T>& b) { return a /= b; }

template <class T> constexpr Dual<T> operator+(Dual<T> a, T b) { return a += Dual<T>(b); }
template <class T> constexpr Dual<T> operator+(T a, const Dual<T>& b) { return Dual<T>(a) + b; }
template <class T> constexpr Dual<T> operator-(Dual<T> a, T b) { return a -= Dual<T>(b); }
template <class T> constexpr Dual<T> operator-(T a, const Dual<T>& b) { return Dual<T>(a) - b; }
template <class T> constexpr Dual<T> operator*(const Dual<T>& a, T b) { return {a.value * b, a.deriv * b}; }
template <class T> constexpr Dual<T> operator*(T a, const Dual<T>& b) { return {a * b.value, a * b.deriv}; }
template <class T> constexpr Dual<T> operator/(const Dual<T>& a, T b) { return {a.value / b, a.deriv / b}; }
template <class T> constexpr Dual<T> operator/(T a, const Dual<T>& b) { return Dual<T>(a) / b; }

template <class T>
Dual<T> tanh(const Dual<T>& a) {
  using std::tanh;
  const T y = tanh(a.value);
  return {y, (T(1) - y * y) * a.deriv};
}

template <class T>
constexpr Dual<T> square(const Dual<T>& a) {
  return {a.value * a.value, T(2) * a.value * a.deriv};
}

template <class T>
std::ostream& operator<<(std::ostream& os, const Dual<T>& a) {
  return os << "(" << a.value << ", " << a.deriv << ")";
}

/// Evaluates `f` at the time input `t` seeded with dt/dt = 1; the result's
/// deriv fields hold the exact derivative with respect to t.
template <class F>
auto forward_with_time_derivative(F&& f, double t) {
  return std::forward<F>(f)(Dual<double>::variable(t));
}

}  // namespace aopinn::diffkit
