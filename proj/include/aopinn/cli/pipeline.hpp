#pragma once

// The experiments behind the CLI subcommands, free of any file output.

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aopinn/cli/config.hpp"
#include "aopinn/gp_bo.hpp"
#include "aopinn/pinn.hpp"
#include "aopinn/recon.hpp"
#include "aopinn/seir.hpp"

namespace aopinn::cli {

/// Ground truth plus the training (evenly spaced) and test (random) samples of I.
struct Dataset {
  Trajectory truth;
  ObservationSet train;
  ObservationSet test;
};

inline Dataset make_dataset(const RunConfig& cfg) {
  Dataset d;
  d.truth = simulate(cfg.truth(), cfg.initial_state(), cfg.t_end, cfg.dt);
  d.train = sample_observations(d.truth, cfg.truth(), cfg.n_train, SampleMode::train, cfg.seed_data);
  d.test = sample_observations(d.truth, cfg.truth(), cfg.n_test, SampleMode::test, cfg.seed_data);
  return d;
}

/// Training with S, E, R pseudo-data reconstructed at the candidate epsilon,
/// which also enters the equation loss as a fixed constant.
inline TrainResult train_proposed(const RunConfig& cfg, const Dataset& d, double epsilon,
                                  const decltype(TrainOptions::on_epoch)& on_epoch = {}) {
  const ReconConfig rc{epsilon, cfg.beta, cfg.gamma};
  const ObservationSet train_obs = reconstruct(d.train, rc);
  const ObservationSet test_obs = reconstruct(d.test, rc);
  EpiParams p = cfg.truth();
  p.epsilon = epsilon;
  TrainOptions opt = cfg.train_options(TrainMode::proposed);
  opt.on_epoch = on_epoch;
  return train(init_glorot(cfg.seed_init, cfg.architecture()), train_obs, test_obs, p, cfg.initial_state(), opt);
}

/// Training on I only with epsilon as a trainable parameter starting at epsilon0.
inline TrainResult train_baseline(const RunConfig& cfg, const Dataset& d, double epsilon0,
                                  const decltype(TrainOptions::on_epoch)& on_epoch = {}) {
  TrainOptions opt = cfg.train_options(TrainMode::baseline);
  opt.on_epoch = on_epoch;
  return train(init_glorot(cfg.seed_init, cfg.architecture(), epsilon0), d.train, d.test, cfg.truth(),
               cfg.initial_state(), opt);
}

struct ProposedRun {
  BoResult bo;
  /// Training run of the best BO evaluation.
  std::optional<TrainResult> best;
  [[nodiscard]] const PinnModel& final_model() const { return best->at_min_test; }
};

/// BO over epsilon with the minimum test error of the proposed training as objective.
inline ProposedRun run_proposed_bo(const RunConfig& cfg, const Dataset& d, const BoLogger& log = {}) {
  ProposedRun run;
  double best = std::numeric_limits<double>::infinity();
  run.bo = run_bo(
      [&](double eps) {
        TrainResult r = train_proposed(cfg, d, eps);
        const double obj = r.record.min_test_error();
        if (obj < best) {
          best = obj;
          run.best = std::move(r);
        }
        return obj;
      },
      cfg.bo_options(), log);
  if (!run.best) throw NumericFailure("bo-proposed: every objective evaluation failed");
  return run;
}

struct BaselineRun {
  BoResult bo;
  std::optional<TrainResult> final;
  double epsilon0 = 0.0;  // BO estimate, used as the starting value
  double epsilon1 = 0.0;  // trained epsilon at the minimum test error
  double epsilon2 = 0.0;  // trained epsilon at the minimum training loss
};

/// BO over the starting value of the trainable epsilon (objective: minimum test
/// error of baseline training), then the baseline training from that estimate.
inline BaselineRun run_baseline_bo(const RunConfig& cfg, const Dataset& d, const BoLogger& log = {}) {
  BaselineRun run;
  double best = std::numeric_limits<double>::infinity();
  run.bo = run_bo(
      [&](double eps) {
        TrainResult r = train_baseline(cfg, d, eps);
        const double obj = r.record.min_test_error();
        if (obj < best) {
          best = obj;
          run.final = std::move(r);
        }
        return obj;
      },
      cfg.bo_options(), log);
  if (!run.final) throw NumericFailure("bo-baseline: every objective evaluation failed");
  // Training is deterministic, so the best evaluation is the run started from epsilon0.
  run.epsilon0 = run.bo.epsilon_hat;
  if (run.final->record.empty()) {
    run.epsilon1 = run.epsilon2 = run.epsilon0;
  } else {
    run.epsilon1 = run.final->record.epsilon_at_min_test();
    run.epsilon2 = run.final->record.epsilon_at_min_train();
  }
  return run;
}

/// Per-compartment RMSE of the model against the ground truth on `points` even times.
inline std::array<double, 4> trajectory_rmse(const PinnModel& model, const Trajectory& truth, int points) {
  const double t_end = truth.times.back();
  std::vector<double> ts;
  for (int k = 0; k < points; ++k) ts.push_back(t_end * k / (points - 1));
  const Matrix pred = predict_values(model, ts);
  std::array<double, 4> se{};
  for (int k = 0; k < points; ++k) {
    const auto x = eval_at(truth, ts[static_cast<std::size_t>(k)]).to_array();
    for (int c = 0; c < 4; ++c) se[static_cast<std::size_t>(c)] += std::pow(pred(k, c) - x[static_cast<std::size_t>(c)], 2);
  }
  for (double& v : se) v = std::sqrt(v / points);
  return se;
}

}  // namespace aopinn::cli
