#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "aopinn/errors.hpp"
#include "aopinn/rng.hpp"

namespace aopinn {

/// Infection, onset and removal rates (1/time).
struct EpiParams {
  double beta = 0.26;
  double epsilon = 0.2;
  double gamma = 0.1;

  void validate() const {
    if (!std::isfinite(beta) || !std::isfinite(epsilon) || !std::isfinite(gamma))
      throw ValidationError("EpiParams: non-finite rate");
    if (beta <= 0.0 || gamma <= 0.0)
      throw ValidationError("EpiParams: beta and gamma must be positive");
    if (epsilon < 0.0) throw ValidationError("EpiParams: epsilon must be non-negative");
  }
};

/// Population ratios of the four compartments.
struct SeirState {
  double s = 0.0;
  double e = 0.0;
  double i = 0.0;
  double r = 0.0;

  static constexpr double kRangeTolerance = 1e-6;
  static constexpr double kSumTolerance = 1e-9;

  [[nodiscard]] double total() const { return s + e + i + r; }
  [[nodiscard]] std::array<double, 4> to_array() const { return {s, e, i, r}; }
  static SeirState from_array(const std::array<double, 4>& a) { return {a[0], a[1], a[2], a[3]}; }

  [[nodiscard]] bool in_range() const {
    for (double v : to_array())
      if (!std::isfinite(v) || v < -kRangeTolerance || v > 1.0 + kRangeTolerance) return false;
    return true;
  }

  void validate() const {
    if (!in_range()) throw ValidationError("SeirState: component outside [-1e-6, 1+1e-6]");
    if (std::abs(total() - 1.0) > kSumTolerance)
      throw ValidationError("SeirState: compartments do not sum to 1");
  }

  friend bool operator==(const SeirState&, const SeirState&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const SeirState& x) {
  return os << "(" << x.s << ", " << x.e << ", " << x.i << ", " << x.r << ")";
}

/// Right-hand side of the SEIR system.
inline std::array<double, 4> seir_rhs(const EpiParams& p, const std::array<double, 4>& x) {
  const double infection = p.beta * x[0] * x[2];
  const double onset = p.epsilon * x[1];
  const double removal = p.gamma * x[2];
  return {-infection, infection - onset, onset - removal, removal};
}

/// Coefficients of the continuous extension of one Dormand-Prince step.
/// y(t_k + theta*h) = y_k + theta*(c1 + (1-theta)*(c2 + theta*(c3 + (1-theta)*c4)))
struct DenseSegment {
  std::array<double, 4> c1{}, c2{}, c3{}, c4{};
};

struct Trajectory {
  std::vector<double> times;
  std::vector<SeirState> states;
  std::vector<DenseSegment> segments;  // segments[k] spans [times[k], times[k+1]]
  EpiParams params;
  double max_local_error = 0.0;  // max |y5 - y4| over all steps (embedded-pair diagnostic)

  [[nodiscard]] double t_begin() const { return times.front(); }
  [[nodiscard]] double t_end() const { return times.back(); }
  [[nodiscard]] std::size_t size() const { return times.size(); }
};

namespace detail {

using Vec4 = std::array<double, 4>;

inline Vec4 axpy(const Vec4& y, double h, std::initializer_list<std::pair<double, const Vec4*>> terms) {
  Vec4 out = y;
  for (int c = 0; c < 4; ++c) {
    double acc = 0.0;
    for (const auto& [a, k] : terms) acc += a * (*k)[c];
    out[c] += h * acc;
  }
  return out;
}

}  // namespace detail

/// Fixed-step Dormand-Prince RK5(4) on [0, t_end]; grid points are k*dt, the last
/// step is shortened if t_end is not a multiple of dt.
inline Trajectory simulate(const EpiParams& params, const SeirState& init, double t_end, double dt) {
  using detail::Vec4;
  params.validate();
  init.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("simulate: dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ValidationError("simulate: t_end must be positive");

  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  // 4th-order embedded weights
  constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                   e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;
  // Hairer's dense-output coefficients
  constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                   d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                   d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  const auto steps_exact = t_end / dt;
  auto steps = static_cast<std::size_t>(std::ceil(steps_exact - 1e-9));
  if (steps == 0) steps = 1;

  Trajectory traj;
  traj.params = params;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.segments.reserve(steps);
  traj.times.push_back(0.0);
  traj.states.push_back(init);

  auto f = [&](const Vec4& x) { return seir_rhs(params, x); };
  Vec4 y = init.to_array();
  Vec4 k1 = f(y);
  for (std::size_t n = 0; n < steps; ++n) {
    const double t0 = static_cast<double>(n) * dt;
    const double t1 = (n + 1 == steps) ? t_end : static_cast<double>(n + 1) * dt;
    const double h = t1 - t0;

    const Vec4 k2 = f(detail::axpy(y, h, {{a21, &k1}}));
    const Vec4 k3 = f(detail::axpy(y, h, {{a31, &k1}, {a32, &k2}}));
    const Vec4 k4 = f(detail::axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const Vec4 k5 = f(detail::axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const Vec4 k6 =
        f(detail::axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const Vec4 y1 = detail::axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const Vec4 k7 = f(y1);
    const Vec4 y1_low =
        detail::axpy(y, h, {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});

    DenseSegment seg;
    for (int c = 0; c < 4; ++c) {
      if (!std::isfinite(y1[c]))
        throw NumericFailure("simulate: non-finite state at step " + std::to_string(n + 1) +
                             " (t=" + std::to_string(t1) + ")");
      traj.max_local_error = std::max(traj.max_local_error, std::abs(y1[c] - y1_low[c]));
      seg.c1[c] = y1[c] - y[c];
      seg.c2[c] = h * k1[c] - seg.c1[c];
      seg.c3[c] = seg.c1[c] - h * k7[c] - seg.c2[c];
      seg.c4[c] = h * (d1 * k1[c] + d3 * k3[c] + d4 * k4[c] + d5 * k5[c] + d6 * k6[c] + d7 * k7[c]);
    }
    const auto next = SeirState::from_array(y1);
    if (!next.in_range())
      throw NumericFailure("simulate: compartment left [-1e-6, 1+1e-6] at step " +
                           std::to_string(n + 1));

    traj.times.push_back(t1);
    traj.states.push_back(next);
    traj.segments.push_back(seg);
    y = y1;
    k1 = k7;
  }
  return traj;
}

/// Dense-output evaluation; exact (stored value) at grid points.
inline SeirState eval_at(const Trajectory& traj, double t) {
  if (!(t >= traj.t_begin() && t <= traj.t_end()))
    throw DomainError("eval_at: t=" + std::to_string(t) + " outside [" +
                      std::to_string(traj.t_begin()) + ", " + std::to_string(traj.t_end()) + "]");
  auto it = std::upper_bound(traj.times.begin(), traj.times.end(), t);
  auto k = static_cast<std::size_t>(std::distance(traj.times.begin(), it)) - 1;
  if (traj.times[k] == t) return traj.states[k];

  const double h = traj.times[k + 1] - traj.times[k];
  const double theta = (t - traj.times[k]) / h;
  const double rest = 1.0 - theta;
  const auto y0 = traj.states[k].to_array();
  const auto& seg = traj.segments[k];
  std::array<double, 4> out{};
  for (int c = 0; c < 4; ++c)
    out[c] = y0[c] + theta * (seg.c1[c] + rest * (seg.c2[c] + theta * (seg.c3[c] + rest * seg.c4[c])));
  return SeirState::from_array(out);
}

/// First and second time derivatives of I obtained by substituting a state into
/// the model equations.
struct IDerivatives {
  double i_dot = 0.0;
  double i_ddot = 0.0;
};

inline IDerivatives analytic_i_derivatives(const EpiParams& p, const SeirState& x) {
  const double i_dot = p.epsilon * x.e - p.gamma * x.i;
  const double e_dot = p.beta * x.s * x.i - p.epsilon * x.e;
  return {i_dot, p.epsilon * e_dot - p.gamma * i_dot};
}

/// Sampled observations of I and its derivatives, plus optional pseudo-data for
/// the unobserved compartments.
struct ObservationSet {
  std::vector<double> times;
  std::vector<double> i_obs, i_dot, i_ddot;
  std::optional<std::vector<double>> pseudo_s, pseudo_e, pseudo_r;

  [[nodiscard]] std::size_t size() const { return times.size(); }
  [[nodiscard]] bool has_pseudo_data() const {
    return pseudo_s.has_value() && pseudo_e.has_value() && pseudo_r.has_value();
  }

  void validate() const {
    const auto n = times.size();
    if (i_obs.size() != n || i_dot.size() != n || i_ddot.size() != n)
      throw ValidationError("ObservationSet: sequence lengths differ");
    for (const auto* seq : {&pseudo_s, &pseudo_e, &pseudo_r})
      if (seq->has_value() && (*seq)->size() != n)
        throw ValidationError("ObservationSet: pseudo-data length differs");
  }
};

enum class SampleMode { train, test };

inline ObservationSet sample_observations(const Trajectory& traj, const EpiParams& params,
                                          std::size_t n, SampleMode mode, std::uint64_t seed) {
  if (n < 2) throw ValidationError("sample_observations: n must be at least 2");
  const double lo = traj.t_begin();
  const double hi = traj.t_end();

  ObservationSet obs;
  obs.times.resize(n);
  if (mode == SampleMode::train) {
    for (std::size_t k = 0; k < n; ++k)
      obs.times[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    obs.times.back() = hi;
  } else {
    CounterRng rng(seed);
    for (auto& t : obs.times) t = rng.uniform(lo, hi);
    std::sort(obs.times.begin(), obs.times.end());
  }

  obs.i_obs.reserve(n);
  obs.i_dot.reserve(n);
  obs.i_ddot.reserve(n);
  for (double t : obs.times) {
    const auto x = eval_at(traj, t);
    const auto d = analytic_i_derivatives(params, x);
    obs.i_obs.push_back(x.i);
    obs.i_dot.push_back(d.i_dot);
    obs.i_ddot.push_back(d.i_ddot);
  }
  return obs;
}

/// `t,S,E,I,R` with 17 significant digits.
inline void write_trajectory_csv(std::ostream& os, const std::vector<double>& times,
                                 const std::vector<SeirState>& states) {
  char buf[256];
  os << "t,S,E,I,R\n";
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto& x = states[k];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", times[k], x.s, x.e, x.i, x.r);
    os << buf;
  }
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  write_trajectory_csv(os, traj.times, traj.states);
}

}  // namespace aopinn
