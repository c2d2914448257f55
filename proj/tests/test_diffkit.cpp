#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "aopinn/diffkit/dual.hpp"
#include "aopinn/diffkit/tape.hpp"
#include "aopinn/rng.hpp"

using namespace aopinn;
using namespace aopinn::diffkit;

namespace {

bool close_rel(double a, double b, double rel, double abs_floor) {
  return std::abs(a - b) <= std::max(rel * std::max(std::abs(a), std::abs(b)), abs_floor);
}

Vector random_vector(Index n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  CounterRng rng(seed);
  Vector v(n);
  for (Index k = 0; k < n; ++k) v[k] = rng.uniform(lo, hi);
  return v;
}

template <class F>
Vector central_differences(F&& f, Vector x, double h = 1e-5) {
  Vector g(x.size());
  for (Index k = 0; k < x.size(); ++k) {
    const double x0 = x[k];
    x[k] = x0 + h;
    const double fp = f(x);
    x[k] = x0 - h;
    const double fm = f(x);
    x[k] = x0;
    g[k] = (fp - fm) / (2 * h);
  }
  return g;
}

// Scalar network 1 -> widths... -> outputs on Dual numbers, params laid out as
// [W (out x in, column-major), b] per layer.
template <class T>
std::vector<T> scalar_net(const Vector& p, const std::vector<int>& widths, T t) {
  std::vector<T> h{t};
  Index off = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const int in = widths[l];
    const int out = widths[l + 1];
    std::vector<T> next(static_cast<std::size_t>(out));
    for (int o = 0; o < out; ++o) {
      T acc = T(p[off + in * out + o]);
      for (int i = 0; i < in; ++i) acc = acc + T(p[off + i * out + o]) * h[static_cast<std::size_t>(i)];
      next[static_cast<std::size_t>(o)] = (l + 2 < widths.size()) ? tanh(acc) : acc;
    }
    off += in * out + out;
    h = std::move(next);
  }
  return h;
}

Index net_size(const std::vector<int>& widths) {
  Index n = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) n += widths[l] * widths[l + 1] + widths[l + 1];
  return n;
}

// Same network on the tape, batch of times.
Var tape_net(Tape& tape, const Vector& p, const std::vector<int>& widths, const std::vector<double>& ts) {
  Matrix t(static_cast<Index>(ts.size()), 1);
  for (std::size_t k = 0; k < ts.size(); ++k) t(static_cast<Index>(k), 0) = ts[k];
  Var h = tape.input(t, Matrix::Ones(t.rows(), 1));
  Index off = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const int in = widths[l];
    const int out = widths[l + 1];
    Var w = tape.parameter(p, off, out, in);
    Var b = tape.parameter(p, off + in * out, out, 1);
    h = tape.affine(h, w, b);
    if (l + 2 < widths.size()) h = tanh(h);
    off += in * out + out;
  }
  return h;
}

}  // namespace

TEST(Dual, PolynomialDerivative) {
  const auto y = forward_with_time_derivative([](auto t) { return t * t; }, 3.0);
  EXPECT_EQ(y.value, 9.0);
  EXPECT_EQ(y.deriv, 6.0);
}

TEST(Dual, TanhAtZero) {
  const auto y = forward_with_time_derivative([](auto t) { return tanh(t); }, 0.0);
  EXPECT_EQ(y.value, 0.0);
  EXPECT_EQ(y.deriv, 1.0);
}

TEST(Dual, QuotientAndSquareRules) {
  const auto y = forward_with_time_derivative(
      [](auto t) { return square(t + 1.0) / (2.0 * t - 1.0); }, 2.0);
  // f = (t+1)^2/(2t-1); f' = (2(t+1)(2t-1) - 2(t+1)^2)/(2t-1)^2 = (18 - 18)/9 = 0 at t=2
  EXPECT_DOUBLE_EQ(y.value, 3.0);
  EXPECT_NEAR(y.deriv, 0.0, 1e-15);
}

TEST(Dual, TwoLayerNetworkMatchesFiniteDifference) {
  const std::vector<int> widths{1, 6, 3};
  const Vector p = random_vector(net_size(widths), 3);
  for (double t : {-0.7, 0.1, 0.9}) {
    const auto out = scalar_net(p, widths, Dual<double>::variable(t));
    const double h = 1e-5;
    const auto plus = scalar_net(p, widths, t + h);
    const auto minus = scalar_net(p, widths, t - h);
    for (std::size_t k = 0; k < out.size(); ++k) {
      const double fd = (plus[k] - minus[k]) / (2 * h);
      EXPECT_TRUE(close_rel(out[k].deriv, fd, 1e-6, 1e-10)) << out[k].deriv << " vs " << fd;
    }
  }
}

TEST(Tape, ForwardAgreesWithScalarDuals) {
  const std::vector<int> widths{1, 5, 5, 2};
  const Vector p = random_vector(net_size(widths), 5);
  Tape tape;
  const std::vector<double> ts{-0.5, 0.25, 0.8};
  Var out = tape_net(tape, p, widths, ts);
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const auto ref = scalar_net(p, widths, Dual<double>::variable(ts[k]));
    for (int j = 0; j < 2; ++j) {
      EXPECT_NEAR(out.value()(static_cast<Index>(k), j), ref[static_cast<std::size_t>(j)].value, 1e-14);
      EXPECT_NEAR(out.deriv()(static_cast<Index>(k), j), ref[static_cast<std::size_t>(j)].deriv, 1e-14);
    }
  }
}

TEST(Tape, SumOfSquaresGradientIsTwiceWeights) {
  const Vector w = random_vector(7, 1);
  const auto r = gradient([](Tape& t, const Vector& p) { return sum(square(t.parameter(p, 0, 7, 1))); }, w);
  EXPECT_NEAR(r.value, w.squaredNorm(), 1e-15);
  for (Index k = 0; k < 7; ++k) EXPECT_DOUBLE_EQ(r.gradient[k], 2 * w[k]);
}

TEST(Tape, DeadParameterHasExactlyZeroGradient) {
  const Vector w = random_vector(4, 2);
  const auto r = gradient([](Tape& t, const Vector& p) { return sum(square(t.parameter(p, 0, 3, 1))); }, w);
  EXPECT_EQ(r.gradient[3], 0.0);
}

TEST(Tape, SquaredTimeDerivativeLossMatchesFiniteDifferences) {
  // loss = (dI/dt at t0)^2 through a 1-4-4 network
  const std::vector<int> widths{1, 4, 4};
  const Vector p = random_vector(net_size(widths), 9);
  auto loss_fn = [&](Tape& tape, const Vector& q) {
    Var out = tape_net(tape, q, widths, {0.37});
    return square(time_deriv(tape.column(out, 2)));
  };
  const auto r = gradient(loss_fn, p);
  auto value = [&](const Vector& q) {
    return std::pow(scalar_net(q, widths, Dual<double>::variable(0.37))[2].deriv, 2);
  };
  EXPECT_NEAR(r.value, value(p), 1e-15);
  const Vector fd = central_differences(value, p);
  for (Index k = 0; k < p.size(); ++k)
    EXPECT_TRUE(close_rel(r.gradient[k], fd[k], 1e-5, 1e-8)) << k << ": " << r.gradient[k] << " vs " << fd[k];
}

TEST(Tape, EveryPrimitiveGradientMatchesFiniteDifferences) {
  // Exercises div, mul, sub, add_const, scale, mul_scalar (with a t-dependent
  // scalar) and mean on Dual-valued nodes.
  const std::vector<int> widths{1, 4, 3};
  const Index n_net = net_size(widths);
  const Vector p = random_vector(n_net + 1, 21, 0.2, 0.9);
  auto loss_fn = [&](Tape& tape, const Vector& q) {
    Var out = tape_net(tape, q, widths, {0.1, 0.4, 0.7});
    Var a = tape.column(out, 0);
    Var b = tape.column(out, 1) + 3.0;
    Var c = tape.column(out, 2);
    Var s = tape.parameter(q, n_net, 1, 1);
    Var ratio = a / b;
    Var mixed = tape.mul_scalar(ratio * c - 0.5 * a, s);
    Var rate = time_deriv(mixed) + time_deriv(ratio);
    Var t_scalar = tape.mean(tape.column(out, 1));  // carries a nonzero deriv
    Var scaled = tape.mul_scalar(c, t_scalar);
    return mean(square(rate)) + mean(square(time_deriv(scaled))) + sum(square(mixed));
  };
  const auto r = gradient(loss_fn, p);
  auto value = [&](const Vector& q) {
    Tape tape;
    return loss_fn(tape, q).scalar();
  };
  const Vector fd = central_differences(value, p);
  for (Index k = 0; k < p.size(); ++k)
    EXPECT_TRUE(close_rel(r.gradient[k], fd[k], 1e-5, 1e-8)) << k << ": " << r.gradient[k] << " vs " << fd[k];
}

TEST(Tape, GradientIsLinearInLoss) {
  const std::vector<int> widths{1, 4, 4};
  const Vector p = random_vector(net_size(widths), 4);
  auto l1 = [&](Tape& tape, const Vector& q) {
    return mean(square(time_deriv(tape_net(tape, q, widths, {0.2, 0.6}))));
  };
  auto l2 = [&](Tape& tape, const Vector& q) { return mean(square(tape_net(tape, q, widths, {0.3}))); };
  const double a = 0.75, b = -2.5;
  auto combined = [&](Tape& tape, const Vector& q) { return a * l1(tape, q) + b * l2(tape, q); };
  const Vector g = gradient(combined, p).gradient;
  const Vector ref = a * gradient(l1, p).gradient + b * gradient(l2, p).gradient;
  EXPECT_LE((g - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Tape, GradientIsBitReproducible) {
  const std::vector<int> widths{1, 8, 8, 4};
  const Vector p = random_vector(net_size(widths), 8);
  auto loss = [&](Tape& tape, const Vector& q) {
    Var out = tape_net(tape, q, widths, {0.0, 0.5, 1.0});
    return mean(square(time_deriv(out))) + mean(square(out));
  };
  const Vector g1 = gradient(loss, p).gradient;
  const Vector g2 = gradient(loss, p).gradient;
  for (Index k = 0; k < p.size(); ++k) EXPECT_EQ(g1[k], g2[k]);
}

TEST(Tape, NonFiniteForwardFailsBeforeBackprop) {
  Vector p(2);
  p << 1.0, 0.0;
  auto loss = [](Tape& tape, const Vector& q) {
    Var a = tape.parameter(q, 0, 1, 1);
    Var b = tape.parameter(q, 1, 1, 1);
    return sum(a / b);
  };
  EXPECT_THROW(gradient(loss, p), NumericFailure);
}

TEST(Tape, ShapeErrorsAreRejectedAtConstruction) {
  Tape tape;
  Var a = tape.constant(Matrix::Ones(2, 1));
  Var b = tape.constant(Matrix::Ones(3, 1));
  EXPECT_THROW(tape.add(a, b), ValidationError);
  EXPECT_THROW(tape.column(a, 1), ValidationError);
  EXPECT_THROW(tape.mul_scalar(a, b), ValidationError);
  Vector p = Vector::Zero(2);
  EXPECT_THROW(tape.parameter(p, 1, 2, 1), ValidationError);
}
