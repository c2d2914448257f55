// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [--skip-long] [--work DIR]
//
// --skip-long reports the three full-length training criteria as SKIP.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "aopinn/cli/commands.hpp"
#include "aopinn/cli/pipeline.hpp"
#include "aopinn/observability.hpp"
#include "aopinn/pinn.hpp"
#include "aopinn/recon.hpp"
#include "aopinn/seir.hpp"
#include "oracles.hpp"

using namespace aopinn;
using namespace aopinn::cli;
namespace fs = std::filesystem;

namespace {

constexpr double kTrueEpsilon = 0.2;

struct Tally {
  int failed = 0;
  void report(const char* name, bool pass, const std::string& detail) {
    std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failed;
  }
  static void skip(const char* name) {
    std::printf("SKIP %s: --skip-long\n", name);
    std::fflush(stdout);
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void progress(const std::string& s) { std::cerr << s << '\n'; }

// ---------------------------------------------------------------------------
// Simulator: conservation, end state and dense output against classical RK4.

void simulator_suite(Tally& tally) {
  const auto p = oracle::paper_params();
  const auto x0 = oracle::paper_init();
  const Trajectory traj = simulate(p, x0, 200.0, 0.2);
  double drift = 0.0;
  for (const auto& x : traj.states) drift = std::max(drift, std::abs(x.total() - 1.0));

  auto max_diff = [](const SeirState& a, const SeirState& b) {
    return std::max({std::abs(a.s - b.s), std::abs(a.e - b.e), std::abs(a.i - b.i), std::abs(a.r - b.r)});
  };
  const double end_err = max_diff(traj.states.back(), oracle::rk4_seir(p, x0, 200.0, 0.01));
  CounterRng rng(2024);
  double dense_err = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double t = rng.uniform(0.0, 200.0);
    dense_err = std::max(dense_err, max_diff(eval_at(traj, t), oracle::rk4_seir(p, x0, t, 0.01)));
  }
  tally.report("simulator", drift <= 1e-9 && end_err <= 1e-6 && dense_err <= 1e-5,
               fmt("conservation %.2e (<=1e-9), t=200 vs RK4 %.2e (<=1e-6), dense output %.2e (<=1e-5)", drift,
                   end_err, dense_err));
}

// ---------------------------------------------------------------------------
// Reconstruction round trip at the true epsilon.

void reconstruction_oracle(Tally& tally) {
  const auto p = oracle::paper_params();
  const Trajectory traj = simulate(p, oracle::paper_init(), 200.0, 0.2);
  const ObservationSet obs = reconstruct(sample_observations(traj, p, 50, SampleMode::train, 1), {0.2, 0.26, 0.1});
  double err = 0.0;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    const auto x = eval_at(traj, obs.times[k]);
    err = std::max({err, std::abs((*obs.pseudo_s)[k] - x.s), std::abs((*obs.pseudo_e)[k] - x.e),
                    std::abs((*obs.pseudo_r)[k] - x.r)});
  }
  tally.report("reconstruction", obs.size() == 50 && err <= 1e-6,
               fmt("max abs error %.2e over %zu points (<=1e-6)", err, obs.size()));
}

// ---------------------------------------------------------------------------
// Gradients of every loss against central differences on a 1-8-8-8-4 network.

PinnModel unit_scale_model(std::uint64_t seed, std::optional<double> eps = std::nullopt) {
  PinnModel m(Architecture{{8, 8, 8}}, eps);
  CounterRng rng(seed);
  for (Index k = 0; k < m.network_parameter_count(); ++k) m.parameters()[k] = rng.uniform(-1.0, 1.0);
  return m;
}

struct GradientCheck {
  double worst_excess = 0.0;  // max of |g - fd| / allowed; <= 1 passes
  long compared = 0;

  template <class LossFn>
  void run(const PinnModel& model, LossFn&& loss) {
    Tape tape;
    const Vector g = tape.gradient(loss(tape, model), model.parameter_count());
    const double h = 1e-5;
    for (Index k = 0; k < model.parameter_count(); ++k) {
      PinnModel plus = model, minus = model;
      plus.parameters()[k] += h;
      minus.parameters()[k] -= h;
      Tape tp, tm;
      const double fd = (loss(tp, plus).scalar() - loss(tm, minus).scalar()) / (2 * h);
      const double allowed = std::max(1e-5 * std::max(std::abs(g[k]), std::abs(fd)), 1e-8);
      worst_excess = std::max(worst_excess, std::abs(g[k] - fd) / allowed);
      ++compared;
    }
  }
};

void gradient_suite(Tally& tally) {
  const auto p = oracle::paper_params();
  const auto x0 = oracle::paper_init();
  const Trajectory traj = simulate(p, x0, 200.0, 0.2);
  GradientCheck check;
  for (std::uint64_t seed : {1, 2, 3}) {
    CounterRng rng(500 + seed);
    std::vector<double> times(10);
    for (auto& t : times) t = rng.uniform(0.0, 200.0);
    const ObservationSet obs =
        reconstruct(sample_observations(traj, p, 10, SampleMode::test, 500 + seed), {0.2, 0.26, 0.1});
    const PinnModel fixed = unit_scale_model(seed);
    const PinnModel trainable = unit_scale_model(seed, 0.3);

    auto data = [&](Tape& t, const PinnModel& m) {
      return data_loss_term(t, network_outputs(t, m, obs.times), obs, LossWeights::proposed());
    };
    auto eq = [&](Tape& t, const PinnModel& m) {
      return equation_loss_term(t, network_outputs(t, m, times), p, epsilon_node(t, m));
    };
    auto init = [&](Tape& t, const PinnModel& m) {
      const double z[1] = {0.0};
      return initial_loss_term(t, network_outputs(t, m, z), x0);
    };
    auto proposed = [&](Tape& t, const PinnModel& m) {
      return total_loss_term(t, m, obs, p, x0, LossWeights::proposed());
    };
    auto baseline = [&](Tape& t, const PinnModel& m) {
      return total_loss_term(t, m, obs, p, x0, LossWeights::baseline());
    };
    auto i_dot = [&](Tape& t, const PinnModel& m) {
      return diffkit::mean(diffkit::square(diffkit::time_deriv(t.column(network_outputs(t, m, times), 2))));
    };
    check.run(fixed, data);
    check.run(fixed, eq);
    check.run(trainable, eq);
    check.run(fixed, init);
    check.run(fixed, proposed);
    check.run(trainable, baseline);
    check.run(fixed, i_dot);
  }
  tally.report("gradients", check.worst_excess <= 1.0,
               fmt("%ld partials compared, worst |g-fd| / max(1e-5 rel, 1e-8) = %.3f (<=1)", check.compared,
                   check.worst_excess));
}

// ---------------------------------------------------------------------------
// Groebner-basis verification of the recovery polynomials.

void groebner(Tally& tally) {
  const auto t0 = std::chrono::steady_clock::now();
  const ObservabilityReport r = run_observability();
  const double secs = seconds_since(t0);
  std::ostringstream text;
  write_observability_report(text, r);
  const bool printed = text.str().find("(e)*E-d1Y+(-g)*Y") != std::string::npos;
  tally.report("groebner", r.ok() && printed && r.samples == 100 && secs <= 60.0,
               fmt("basis %zu, E relation %s, S relation %s, vanish on %zu samples %s, %.2f s (<=60)",
                   r.basis.size(), r.e_matches && printed ? "found" : "missing",
                   r.s_matches ? "found" : "missing", r.samples,
                   r.basis_vanishes && r.relations_vanish ? "yes" : "no", secs));
}

// ---------------------------------------------------------------------------
// Determinism: every subcommand twice with one config, CSV bytes compared.

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void determinism(Tally& tally, const fs::path& work) {
  using Command = int (*)(const RunConfig&, CommandIo);
  const std::vector<std::pair<std::string, Command>> commands{
      {"simulate", cmd_simulate},           {"train-forward", cmd_train_forward},
      {"train-inverse", cmd_train_inverse}, {"bo-proposed", cmd_bo_proposed},
      {"bo-baseline", cmd_bo_baseline},     {"observability", cmd_observability}};
  RunConfig cfg;
  cfg.hidden = {8, 8};
  cfg.epochs = 60;
  cfg.bo_iterations = 4;
  cfg.bo_init = 2;
  cfg.n_train = 20;
  cfg.n_test = 20;

  int compared = 0;
  std::vector<std::string> mismatches;
  for (const auto& [name, fn] : commands) {
    std::vector<std::vector<std::pair<std::string, std::string>>> runs;
    for (int rep = 0; rep < 2; ++rep) {
      RunConfig c = cfg;
      c.out_dir = (work / "determinism" / (name + "-" + std::to_string(rep))).string();
      fs::remove_all(c.out_dir);
      std::ostringstream sink;
      fn(c, CommandIo{sink, {}});
      std::vector<std::pair<std::string, std::string>> files;
      for (const auto& e : fs::directory_iterator(c.out_dir)) {
        const auto ext = e.path().extension();
        if (ext == ".csv" || ext == ".txt") files.emplace_back(e.path().filename().string(), slurp(e.path()));
      }
      std::sort(files.begin(), files.end());
      runs.push_back(std::move(files));
    }
    if (runs[0].empty() || runs[0] != runs[1]) mismatches.push_back(name);
    compared += static_cast<int>(runs[0].size());
  }
  std::string detail = fmt("%d output files across %zu subcommands byte-identical", compared, commands.size());
  if (!mismatches.empty()) {
    detail = "differences in:";
    for (const auto& m : mismatches) detail += " " + m;
  }
  tally.report("determinism", mismatches.empty(), detail);
}

// ---------------------------------------------------------------------------
// Training criteria.

RunConfig seeded(std::uint64_t s) {
  RunConfig cfg;
  cfg.seed_data = cfg.seed_init = cfg.seed_bo = s;
  return cfg;
}

BoLogger tagged(const std::string& tag) {
  return [tag](const std::string& s) { progress(tag + " " + s); };
}

void reduced_recovery(Tally& tally) {
  RunConfig cfg = seeded(1);
  cfg.epochs = 5000;
  cfg.bo_iterations = 10;
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset d = make_dataset(cfg);
  const ProposedRun run = run_proposed_bo(cfg, d, tagged("[reduced]"));
  const double secs = seconds_since(t0);
  const double err = std::abs(run.bo.epsilon_hat - kTrueEpsilon);
  tally.report("eps_recovery_reduced", err <= 0.05 && secs <= 900.0,
               fmt("seeds (1,1,1), 5000 epochs, 10 iterations: epsilon_hat %.4f, |err| %.4f (<=0.05), %.0f s (<=900)",
                   run.bo.epsilon_hat, err, secs));
}

void full_criteria(Tally& tally) {
  std::vector<double> errors;
  std::string detail;
  std::vector<std::array<double, 4>> rmses;
  std::optional<Dataset> first_data;
  for (std::uint64_t s : {1, 2, 3}) {
    const RunConfig cfg = seeded(s);
    const Dataset d = make_dataset(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const ProposedRun run =
        run_proposed_bo(cfg, d, tagged(fmt("[proposed %llu]", static_cast<unsigned long long>(s))));
    const double err = std::abs(run.bo.epsilon_hat - kTrueEpsilon);
    errors.push_back(err);
    rmses.push_back(trajectory_rmse(run.final_model(), d.truth, 201));
    detail += fmt("%s(%llu,%llu,%llu) %.4f", detail.empty() ? "" : "; ", static_cast<unsigned long long>(s),
                  static_cast<unsigned long long>(s), static_cast<unsigned long long>(s), run.bo.epsilon_hat);
    progress(fmt("[proposed %llu] epsilon_hat %.6f in %.0f s", static_cast<unsigned long long>(s),
                 run.bo.epsilon_hat, seconds_since(t0)));
    if (!first_data) first_data = d;
  }
  const long hits = std::count_if(errors.begin(), errors.end(), [](double e) { return e <= 0.02; });
  tally.report("eps_recovery", hits >= 2,
               fmt("epsilon_hat by seeds %s; %ld of 3 within 0.02 (need 2)", detail.c_str(), hits));

  // Judged on the default seeds; the other triples are reported for context only.
  const auto& rmse = rmses[0];
  const double worst = *std::max_element(rmse.begin(), rmse.end());
  std::string others;
  for (std::size_t k = 1; k < rmses.size(); ++k)
    others += fmt("; (%zu,%zu,%zu) max %.2e", k + 1, k + 1, k + 1,
                  *std::max_element(rmses[k].begin(), rmses[k].end()));
  tally.report("trajectory_fit", worst <= 0.01,
               fmt("seeds (1,1,1) RMSE S %.2e E %.2e I %.2e R %.2e (each <=0.01) [not judged%s]", rmse[0], rmse[1],
                   rmse[2], rmse[3], others.c_str()));

  const RunConfig cfg = seeded(1);
  const BaselineRun base = run_baseline_bo(cfg, *first_data, tagged("[baseline 1]"));
  const double e1 = std::abs(base.epsilon1 - kTrueEpsilon);
  const double e2 = std::abs(base.epsilon2 - kTrueEpsilon);
  tally.report("baseline_trend", e1 > errors[0] && e2 > errors[0],
               fmt("seeds (1,1,1): baseline eps0 %.4f eps1 %.4f (|err| %.4f) eps2 %.4f (|err| %.4f) vs proposed "
                   "|err| %.4f",
                   base.epsilon0, base.epsilon1, e1, base.epsilon2, e2, errors[0]));
}

}  // namespace

int main(int argc, char** argv) {
  bool skip_long = false;
  fs::path work = fs::temp_directory_path() / "aopinn-acceptance";
  for (int k = 1; k < argc; ++k) {
    const std::string a = argv[k];
    if (a == "--skip-long") {
      skip_long = true;
    } else if (a == "--work" && k + 1 < argc) {
      work = argv[++k];
    } else {
      std::cerr << "usage: acceptance [--skip-long] [--work DIR]\n";
      return 2;
    }
  }
  fs::create_directories(work);

  Tally tally;
  try {
    simulator_suite(tally);
    reconstruction_oracle(tally);
    gradient_suite(tally);
    groebner(tally);
    determinism(tally, work);
    reduced_recovery(tally);
    if (skip_long) {
      for (const char* n : {"eps_recovery", "trajectory_fit", "baseline_trend"}) Tally::skip(n);
    } else {
      full_criteria(tally);
    }
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance: aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%s: %d failed\n", tally.failed == 0 ? "ALL PASS" : "SOME FAILED", tally.failed);
  return tally.failed == 0 ? 0 : 1;
}
