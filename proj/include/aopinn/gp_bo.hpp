#pragma once

// One-dimensional Gaussian-process Bayesian optimization with Expected
// Improvement (minimization) over a closed box.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aopinn/errors.hpp"
#include "aopinn/rng.hpp"

namespace aopinn {

struct GpOptions {
  double noise_floor = 1e-10;
  /// Candidate length scales; the one maximizing the log marginal likelihood wins.
  std::vector<double> length_scales = default_length_scales();

  static std::vector<double> default_length_scales() {
    std::vector<double> v;
    for (int k = 0; k < 10; ++k) v.push_back(0.01 * std::pow(50.0, k / 9.0));  // 0.01 ... 0.5
    return v;
  }
};

/// Matern-5/2 correlation with unit signal variance.
inline double matern52(double x, double y, double length_scale) {
  const double r = std::sqrt(5.0) * std::abs(x - y) / length_scale;
  return (1.0 + r + r * r / 3.0) * std::exp(-r);
}

/// Exact GP regression on standardized objective values.
class GpPosterior {
 public:
  struct Moments {
    double mean = 0.0;
    double variance = 0.0;
  };

  /// Non-finite objectives are dropped and their indices listed in excluded().
  static GpPosterior fit(std::span<const std::pair<double, double>> points, const GpOptions& opt = {}) {
    GpPosterior gp;
    gp.noise_ = opt.noise_floor;
    for (std::size_t k = 0; k < points.size(); ++k) {
      if (std::isfinite(points[k].second) && std::isfinite(points[k].first)) {
        gp.xs_.push_back(points[k].first);
        gp.ys_.push_back(points[k].second);
      } else {
        gp.excluded_.push_back(k);
      }
    }
    if (gp.xs_.empty()) throw ValidationError("gp_fit: no finite observations");
    if (opt.length_scales.empty()) throw ValidationError("gp_fit: empty length-scale grid");

    const auto n = static_cast<Eigen::Index>(gp.xs_.size());
    double mean = 0.0;
    for (double y : gp.ys_) mean += y;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double y : gp.ys_) var += (y - mean) * (y - mean);
    var /= static_cast<double>(n);
    gp.y_mean_ = mean;
    gp.y_std_ = var > 0.0 ? std::sqrt(var) : 1.0;
    Eigen::VectorXd z(n);
    for (Eigen::Index k = 0; k < n; ++k) z[k] = (gp.ys_[static_cast<std::size_t>(k)] - mean) / gp.y_std_;

    // Ties (e.g. a single observation) go to the longest length scale.
    bool have = false;
    for (double ell : opt.length_scales) {
      Candidate c = factorize(gp.xs_, z, ell, opt.noise_floor);
      if (!have || (c.lml >= gp.best_.lml && ell > gp.best_.length_scale) || c.lml > gp.best_.lml) {
        gp.best_ = std::move(c);
        have = true;
      }
    }
    return gp;
  }

  /// Posterior of the latent function in the standardized space.
  [[nodiscard]] Moments predict_standardized(double x) const {
    const auto n = static_cast<Eigen::Index>(xs_.size());
    Eigen::VectorXd ks(n);
    for (Eigen::Index k = 0; k < n; ++k) ks[k] = matern52(x, xs_[static_cast<std::size_t>(k)], best_.length_scale);
    const double mu = ks.dot(best_.alpha);
    const Eigen::VectorXd v = best_.chol.matrixL().solve(ks);
    return {mu, std::max(0.0, 1.0 - v.squaredNorm())};
  }

  /// Posterior in original objective units.
  [[nodiscard]] Moments predict(double x) const {
    const auto m = predict_standardized(x);
    return {y_mean_ + y_std_ * m.mean, y_std_ * y_std_ * m.variance};
  }

  [[nodiscard]] double standardize(double y) const { return (y - y_mean_) / y_std_; }
  [[nodiscard]] double length_scale() const { return best_.length_scale; }
  [[nodiscard]] double log_marginal_likelihood() const { return best_.lml; }
  [[nodiscard]] double jitter() const { return best_.jitter; }
  [[nodiscard]] double noise_floor() const { return noise_; }
  [[nodiscard]] double y_mean() const { return y_mean_; }
  [[nodiscard]] double y_std() const { return y_std_; }
  [[nodiscard]] const std::vector<double>& xs() const { return xs_; }
  [[nodiscard]] const std::vector<double>& ys() const { return ys_; }
  [[nodiscard]] const std::vector<std::size_t>& excluded() const { return excluded_; }
  [[nodiscard]] double best_observed() const {
    double b = std::numeric_limits<double>::infinity();
    for (double y : ys_) b = std::min(b, y);
    return b;
  }

 private:
  struct Candidate {
    double length_scale = 0.0;
    double jitter = 0.0;
    double lml = -std::numeric_limits<double>::infinity();
    Eigen::LLT<Eigen::MatrixXd> chol;
    Eigen::VectorXd alpha;
  };

  static Candidate factorize(const std::vector<double>& xs, const Eigen::VectorXd& z, double ell, double noise) {
    const auto n = static_cast<Eigen::Index>(xs.size());
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        K(i, j) = matern52(xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(j)], ell);

    Candidate c;
    c.length_scale = ell;
    // Escalate the diagonal jitter until the factorization succeeds.
    for (double jitter = noise; jitter <= 1.0; jitter *= 10.0) {
      Eigen::MatrixXd Kj = K;
      Kj.diagonal().array() += jitter;
      c.chol.compute(Kj);
      if (c.chol.info() == Eigen::Success && (c.chol.matrixLLT().diagonal().array() > 0.0).all()) {
        c.jitter = jitter;
        break;
      }
    }
    if (c.chol.info() != Eigen::Success) throw NumericFailure("gp_fit: kernel matrix not positive definite");
    c.alpha = c.chol.solve(z);
    const double log_det = 2.0 * c.chol.matrixLLT().diagonal().array().log().sum();
    c.lml = -0.5 * z.dot(c.alpha) - 0.5 * log_det - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    return c;
  }

  std::vector<double> xs_, ys_;
  std::vector<std::size_t> excluded_;
  double y_mean_ = 0.0;
  double y_std_ = 1.0;
  double noise_ = 0.0;
  Candidate best_;
};

inline GpPosterior gp_fit(std::span<const std::pair<double, double>> points, const GpOptions& opt = {}) {
  return GpPosterior::fit(points, opt);
}

/// EI for minimization: (best - mu - xi) Phi(z) + sigma phi(z), z = (best - mu - xi)/sigma.
inline double expected_improvement(double mean, double sigma, double best, double xi) {
  const double improvement = best - mean - xi;
  if (!(sigma > 0.0)) return std::max(improvement, 0.0);
  const double z = improvement / sigma;
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return std::max(0.0, improvement * cdf + sigma * pdf);
}

inline double expected_improvement(const GpPosterior& post, double eps, double best, double xi) {
  const auto m = post.predict(eps);
  return expected_improvement(m.mean, std::sqrt(m.variance), best, xi);
}

/// Argmax of EI (evaluated in the standardized space, where xi is relative to
/// the objective spread) over `grid_points` evenly spaced points of [lo, hi].
/// Ties go to the smallest epsilon.
inline double propose_next(const GpPosterior& post, double lo, double hi, double xi = 0.01,
                           int grid_points = 1001) {
  if (!(hi > lo) || grid_points < 2) throw ValidationError("propose_next: empty box");
  const double best = post.standardize(post.best_observed());
  double arg = lo;
  double top = -1.0;
  for (int k = 0; k < grid_points; ++k) {
    const double x = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(grid_points - 1);
    const auto m = post.predict_standardized(x);
    const double ei = expected_improvement(m.mean, std::sqrt(m.variance), best, xi);
    if (ei > top) {
      top = ei;
      arg = x;
    }
  }
  return top > 0.0 ? arg : lo;
}

struct BoOptions {
  int iterations = 30;
  int init_count = 5;
  double lo = 0.0;
  double hi = 0.5;
  std::uint64_t seed = 0;
  double xi = 0.01;
  int grid_points = 1001;
  double failure_penalty = 1e6;
  /// Model log10(objective) instead of the raw value (objectives are
  /// non-negative errors spanning several decades).
  bool log_objective = true;
  GpOptions gp{};

  void validate() const {
    if (init_count < 1 || iterations < init_count)
      throw ValidationError("run_bo: need iterations >= init_count >= 1");
    if (!(hi > lo)) throw ValidationError("run_bo: empty search box");
    if (!(failure_penalty > 0.0)) throw ValidationError("run_bo: failure penalty must be positive");
  }
};

struct BoEvaluation {
  int iteration = 0;  // 1-based
  double epsilon = 0.0;
  double objective = 0.0;
  bool is_initial = false;
  bool failed = false;
};

struct BoResult {
  std::vector<BoEvaluation> evaluations;
  std::vector<double> best_trace;  // running minimum after each evaluation
  double epsilon_hat = 0.0;
  double best_objective = std::numeric_limits<double>::infinity();
  int best_iteration = 0;
};

/// Seeded stratified design: one uniform draw per equal-width stratum of the box.
inline std::vector<double> initial_design(const BoOptions& opt) {
  CounterRng rng(opt.seed);
  std::vector<double> xs;
  const double width = (opt.hi - opt.lo) / opt.init_count;
  for (int k = 0; k < opt.init_count; ++k) xs.push_back(opt.lo + width * (k + rng.uniform()));
  return xs;
}

using BoObjective = std::function<double(double)>;
using BoLogger = std::function<void(const std::string&)>;

inline BoResult run_bo(const BoObjective& objective, const BoOptions& opt, const BoLogger& log = {}) {
  opt.validate();
  BoResult result;
  std::vector<std::pair<double, double>> modeled;

  auto evaluate = [&](double x, bool initial) {
    BoEvaluation ev;
    ev.iteration = static_cast<int>(result.evaluations.size()) + 1;
    ev.epsilon = x;
    ev.is_initial = initial;
    std::string failure;
    try {
      ev.objective = objective(x);
      if (!std::isfinite(ev.objective)) failure = "non-finite objective";
    } catch (const std::exception& e) {
      failure = e.what();
    }
    if (!failure.empty()) {
      ev.failed = true;
      ev.objective = opt.failure_penalty;
      if (log) log("bo: objective failed at epsilon=" + std::to_string(x) + " (" + failure + "); penalty applied");
    }
    if (ev.objective < result.best_objective) {
      result.best_objective = ev.objective;
      result.epsilon_hat = x;
      result.best_iteration = ev.iteration;
    }
    result.evaluations.push_back(ev);
    result.best_trace.push_back(result.best_objective);
    const double y = opt.log_objective ? std::log10(std::max(ev.objective, 1e-300)) : ev.objective;
    modeled.emplace_back(x, y);
    if (log) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "bo: iteration %d epsilon=%.6f objective=%.6e%s", ev.iteration, x,
                    ev.objective, initial ? " (initial)" : "");
      log(buf);
    }
  };

  for (double x : initial_design(opt)) evaluate(x, true);
  while (static_cast<int>(result.evaluations.size()) < opt.iterations) {
    const auto post = gp_fit(modeled, opt.gp);
    evaluate(propose_next(post, opt.lo, opt.hi, opt.xi, opt.grid_points), false);
  }
  return result;
}

/// `iteration,epsilon,objective,is_initial`
inline void write_bo_trace_csv(std::ostream& os, const BoResult& r) {
  char buf[128];
  os << "iteration,epsilon,objective,is_initial\n";
  for (const auto& ev : r.evaluations) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%d\n", ev.iteration, ev.epsilon, ev.objective,
                  ev.is_initial ? 1 : 0);
    os << buf;
  }
}

}  // namespace aopinn
