#pragma once

// Subcommands. Each validates its config, computes, then writes every artifact
// and the manifest into cfg.out_dir. Results go to `out`, progress to `log`.

#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>

#include "aopinn/cli/checkpoint.hpp"
#include "aopinn/cli/config.hpp"
#include "aopinn/cli/manifest.hpp"
#include "aopinn/cli/output.hpp"
#include "aopinn/cli/pipeline.hpp"
#include "aopinn/observability.hpp"
#include "aopinn/recon.hpp"

namespace aopinn::cli {

struct CommandIo {
  std::ostream& out;
  /// Progress sink; empty when quiet.
  std::function<void(const std::string&)> log;
};

namespace detail {

inline std::string g17(double v) { return fmt_double(v); }

inline decltype(TrainOptions::on_epoch) progress(const CommandIo& io, long epochs) {
  if (!io.log) return {};
  return [&io, epochs](long epoch, double train, double test, const PinnModel&) {
    if (epoch % 1000 != 0 && epoch != epochs) return;
    char buf[128];
    std::snprintf(buf, sizeof buf, "epoch %ld/%ld train_loss=%.6e test_error=%.6e", epoch, epochs, train, test);
    io.log(buf);
  };
}

inline CheckpointSeeds seeds_of(const RunConfig& cfg) { return {cfg.seed_data, cfg.seed_init, cfg.seed_bo}; }

inline void record_rmse(RunRecorder& rec, CommandIo& io, const PinnModel& model, const Dataset& d,
                        const RunConfig& cfg) {
  const auto rmse = trajectory_rmse(model, d.truth, cfg.plot_points);
  rec.result("rmse", nlohmann::ordered_json{{"S", rmse[0]}, {"E", rmse[1]}, {"I", rmse[2]}, {"R", rmse[3]}});
  io.out << "rmse S=" << g17(rmse[0]) << " E=" << g17(rmse[1]) << " I=" << g17(rmse[2]) << " R=" << g17(rmse[3])
         << '\n';
}

inline void write_model_outputs(RunRecorder& rec, const TrainResult& r, const PinnModel& model, const Dataset& d,
                                const RunConfig& cfg, const std::string& title) {
  rec.write_with("train_record.csv", [&](std::ostream& os) { write_train_record_csv(os, r.record); });
  rec.write_with("predictions.csv",
                 [&](std::ostream& os) { write_predictions_csv(os, model, d.truth, cfg.plot_points); });
  rec.write_with("checkpoint.txt", [&](std::ostream& os) { write_checkpoint(os, model, seeds_of(cfg)); });
  rec.write_with("trajectories.svg",
                 [&](std::ostream& os) { write_trajectory_chart(os, model, d.truth, cfg.plot_points, title); });
  rec.write_with("losses.svg", [&](std::ostream& os) { write_loss_chart(os, r.record, title + ": losses"); });
}

inline void record_training(RunRecorder& rec, CommandIo& io, const TrainRecord& r) {
  rec.result("epochs_run", r.size());
  if (r.empty()) return;
  rec.result("min_test_error", r.min_test_error());
  rec.result("min_test_epoch", r.min_test_epoch());
  rec.result("min_train_loss", r.min_train_loss());
  rec.result("min_train_epoch", r.min_train_epoch());
  io.out << "min_test_error " << g17(r.min_test_error()) << " at epoch " << r.min_test_epoch() << '\n';
  io.out << "min_train_loss " << g17(r.min_train_loss()) << " at epoch " << r.min_train_epoch() << '\n';
}

inline BoLogger bo_logger(const CommandIo& io) {
  if (!io.log) return {};
  return [&io](const std::string& s) { io.log(s); };
}

inline void write_bo_outputs(RunRecorder& rec, const BoResult& bo) {
  rec.write_with("bo_trace.csv", [&](std::ostream& os) { write_bo_trace_csv(os, bo); });
  rec.write_with("bo_trace.svg", [&](std::ostream& os) { write_bo_chart(os, bo); });
  rec.result("bo_evaluations", bo.evaluations.size());
  rec.result("bo_best_iteration", bo.best_iteration);
  rec.result("bo_best_objective", bo.best_objective);
}

}  // namespace detail

inline int cmd_simulate(const RunConfig& cfg, CommandIo io) {
  cfg.validate();
  RunRecorder rec("simulate", cfg);
  const Trajectory traj =
      rec.stage("simulate", [&] { return simulate(cfg.truth(), cfg.initial_state(), cfg.t_end, cfg.dt); });
  rec.write_with("trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, traj); });
  rec.write_with("trajectory.svg", [&](std::ostream& os) { write_simulation_chart(os, traj); });
  double drift = 0.0;
  for (const auto& x : traj.states) drift = std::max(drift, std::abs(x.total() - 1.0));
  rec.result("rows", traj.times.size());
  rec.result("max_conservation_error", drift);
  rec.result("max_local_error_estimate", traj.max_local_error);
  rec.finish();
  io.out << "rows " << traj.times.size() << '\n';
  io.out << "max_conservation_error " << detail::g17(drift) << '\n';
  io.out << "output " << rec.dir().string() << '\n';
  return 0;
}

inline int cmd_train_forward(const RunConfig& cfg, CommandIo io) {
  cfg.validate();
  RunRecorder rec("train-forward", cfg);
  const Dataset d = rec.stage("data", [&] { return make_dataset(cfg); });
  const ReconConfig rc{cfg.forward_epsilon, cfg.beta, cfg.gamma};
  const TrainResult r = rec.stage("train", [&] {
    return train_proposed(cfg, d, cfg.forward_epsilon, detail::progress(io, cfg.epochs));
  });
  rec.write_with("observations_train.csv", [&](std::ostream& os) { write_observations_csv(os, reconstruct(d.train, rc)); });
  rec.write_with("observations_test.csv", [&](std::ostream& os) { write_observations_csv(os, reconstruct(d.test, rc)); });
  detail::write_model_outputs(rec, r, r.at_min_test, d, cfg, "Proposed method, epsilon " + detail::g17(cfg.forward_epsilon));
  io.out << "epsilon " << detail::g17(cfg.forward_epsilon) << '\n';
  detail::record_training(rec, io, r.record);
  detail::record_rmse(rec, io, r.at_min_test, d, cfg);
  rec.finish();
  io.out << "output " << rec.dir().string() << '\n';
  return 0;
}

inline int cmd_train_inverse(const RunConfig& cfg, CommandIo io) {
  cfg.validate();
  RunRecorder rec("train-inverse", cfg);
  const Dataset d = rec.stage("data", [&] { return make_dataset(cfg); });
  const TrainResult r = rec.stage("train", [&] {
    return train_baseline(cfg, d, cfg.inverse_epsilon_init, detail::progress(io, cfg.epochs));
  });
  rec.write_with("observations_train.csv", [&](std::ostream& os) { write_observations_csv(os, d.train); });
  detail::write_model_outputs(rec, r, r.at_min_test, d, cfg, "Baseline method");
  rec.write_with("epsilon_trace.svg", [&](std::ostream& os) { write_epsilon_chart(os, r.record, cfg.epsilon_true); });
  detail::record_training(rec, io, r.record);
  if (!r.record.empty()) {
    rec.result("epsilon_at_min_test", r.record.epsilon_at_min_test());
    rec.result("epsilon_at_min_train", r.record.epsilon_at_min_train());
    io.out << "epsilon_at_min_test " << detail::g17(r.record.epsilon_at_min_test()) << '\n';
    io.out << "epsilon_at_min_train " << detail::g17(r.record.epsilon_at_min_train()) << '\n';
  }
  rec.finish();
  io.out << "output " << rec.dir().string() << '\n';
  return 0;
}

inline int cmd_bo_proposed(const RunConfig& cfg, CommandIo io) {
  cfg.validate();
  RunRecorder rec("bo-proposed", cfg);
  const Dataset d = rec.stage("data", [&] { return make_dataset(cfg); });
  const ProposedRun run = rec.stage("bo", [&] { return run_proposed_bo(cfg, d, detail::bo_logger(io)); });
  detail::write_bo_outputs(rec, run.bo);
  detail::write_model_outputs(rec, *run.best, run.final_model(), d, cfg,
                              "Proposed method, epsilon " + detail::g17(run.bo.epsilon_hat));
  rec.result("epsilon_hat", run.bo.epsilon_hat);
  rec.result("abs_error", std::abs(run.bo.epsilon_hat - cfg.epsilon_true));
  io.out << "epsilon_hat " << detail::g17(run.bo.epsilon_hat) << '\n';
  io.out << "abs_error " << detail::g17(std::abs(run.bo.epsilon_hat - cfg.epsilon_true)) << '\n';
  io.out << "best_objective " << detail::g17(run.bo.best_objective) << " at iteration " << run.bo.best_iteration
         << '\n';
  detail::record_rmse(rec, io, run.final_model(), d, cfg);
  rec.finish();
  io.out << "output " << rec.dir().string() << '\n';
  return 0;
}

inline int cmd_bo_baseline(const RunConfig& cfg, CommandIo io) {
  cfg.validate();
  RunRecorder rec("bo-baseline", cfg);
  const Dataset d = rec.stage("data", [&] { return make_dataset(cfg); });
  const BaselineRun run = rec.stage("bo", [&] { return run_baseline_bo(cfg, d, detail::bo_logger(io)); });
  detail::write_bo_outputs(rec, run.bo);
  detail::write_model_outputs(rec, *run.final, run.final->at_min_test, d, cfg, "Baseline method");
  rec.write_with("epsilon_trace.svg",
                 [&](std::ostream& os) { write_epsilon_chart(os, run.final->record, cfg.epsilon_true); });
  const double e = cfg.epsilon_true;
  rec.result("epsilon_hat_0", run.epsilon0);
  rec.result("epsilon_hat_1", run.epsilon1);
  rec.result("epsilon_hat_2", run.epsilon2);
  rec.result("abs_error_1", std::abs(run.epsilon1 - e));
  rec.result("abs_error_2", std::abs(run.epsilon2 - e));
  io.out << "epsilon_hat_0 " << detail::g17(run.epsilon0) << '\n';
  io.out << "epsilon_hat_1 " << detail::g17(run.epsilon1) << " (min test error)\n";
  io.out << "epsilon_hat_2 " << detail::g17(run.epsilon2) << " (min train loss)\n";
  detail::record_training(rec, io, run.final->record);
  rec.finish();
  io.out << "output " << rec.dir().string() << '\n';
  return 0;
}

/// Exit code 1 when the basis does not confirm the recovery polynomials.
inline int cmd_observability(const RunConfig& cfg, CommandIo io) {
  cfg.validate();
  RunRecorder rec("observability", cfg);
  const ObservabilityReport report = rec.stage("groebner", [&] { return run_observability(); });
  std::ostringstream text;
  write_observability_report(text, report);
  rec.write("observability.txt", text.str());
  rec.result("basis_size", report.basis.size());
  rec.result("ok", report.ok());
  rec.finish();
  io.out << text.str();
  return report.ok() ? 0 : 1;
}

}  // namespace aopinn::cli
