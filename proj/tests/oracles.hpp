#pragma once

// Independent reference computations used only by the test suites.

#include <array>
#include <cmath>

#include "aopinn/seir.hpp"

namespace aopinn::oracle {

/// Classical RK4 integration of the SEIR system from 0 to t with a step no larger than max_dt.
inline SeirState rk4_seir(const EpiParams& p, const SeirState& init, double t, double max_dt = 0.01) {
  auto rhs = [&](const std::array<double, 4>& x) {
    const double inf = p.beta * x[0] * x[2];
    return std::array<double, 4>{-inf, inf - p.epsilon * x[1], p.epsilon * x[1] - p.gamma * x[2],
                                 p.gamma * x[2]};
  };
  auto y = init.to_array();
  if (t == 0.0) return init;
  const int n = static_cast<int>(std::ceil(t / max_dt - 1e-9));
  const double h = t / n;
  for (int k = 0; k < n; ++k) {
    auto shifted = [&](const std::array<double, 4>& d, double a) {
      std::array<double, 4> out{};
      for (int c = 0; c < 4; ++c) out[c] = y[c] + a * d[c];
      return out;
    };
    const auto k1 = rhs(y);
    const auto k2 = rhs(shifted(k1, h / 2));
    const auto k3 = rhs(shifted(k2, h / 2));
    const auto k4 = rhs(shifted(k3, h));
    for (int c = 0; c < 4; ++c) y[c] += h / 6 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
  }
  return SeirState::from_array(y);
}

inline EpiParams paper_params() { return {0.26, 0.2, 0.1}; }
inline SeirState paper_init() { return {0.99, 0.0, 0.01, 0.0}; }

}  // namespace aopinn::oracle
