// aopinn: command-line front end for the SEIR observability/PINN experiments.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "aopinn/cli/commands.hpp"

namespace {

using namespace aopinn;
using namespace aopinn::cli;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitCapped = 4;

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed_data, seed_init, seed_bo;
  std::optional<long> epochs;
  std::optional<int> bo_iterations;
  std::vector<std::string> sets;
  bool quiet = false;
};

RunConfig resolve(const Flags& f) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
  for (const auto& kv : f.sets) apply_override(cfg, kv);
  if (!f.out.empty()) cfg.out_dir = f.out;
  if (f.seed_data) cfg.seed_data = *f.seed_data;
  if (f.seed_init) cfg.seed_init = *f.seed_init;
  if (f.seed_bo) cfg.seed_bo = *f.seed_bo;
  if (f.epochs) cfg.epochs = *f.epochs;
  if (f.bo_iterations) cfg.bo_iterations = *f.bo_iterations;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Algebraically observable PINN for SEIR: estimate the onset rate from I alone"};
  app.set_version_flag("--version", AOPINN_VERSION);
  app.require_subcommand(1);

  Flags flags;
  using Command = int (*)(const RunConfig&, CommandIo);
  Command chosen = nullptr;

  auto add = [&](const char* name, const char* help, Command fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "output directory (overrides out_dir)");
    sub->add_option("--seed-data", flags.seed_data, "seed for the random test times");
    sub->add_option("--seed-init", flags.seed_init, "seed for the network weights");
    sub->add_option("--seed-bo", flags.seed_bo, "seed for the BO initial design");
    sub->add_option("--epochs", flags.epochs, "training epochs per run")->check(CLI::NonNegativeNumber);
    sub->add_option("--bo-iterations", flags.bo_iterations, "total BO evaluations")->check(CLI::PositiveNumber);
    sub->add_option("--set", flags.sets, "override a config key (key=value), repeatable");
    sub->add_flag("--quiet", flags.quiet, "suppress progress output");
    sub->callback([&chosen, fn] { chosen = fn; });
  };
  add("simulate", "integrate the ground-truth SEIR trajectory", cmd_simulate);
  add("train-forward", "train the proposed PINN at a fixed epsilon (forward_epsilon)", cmd_train_forward);
  add("train-inverse", "train the baseline PINN with epsilon as a parameter", cmd_train_inverse);
  add("bo-proposed", "GP-BO over epsilon with the proposed method", cmd_bo_proposed);
  add("bo-baseline", "GP-BO with the baseline method, then inverse training", cmd_bo_baseline);
  add("observability", "Groebner-basis check of the observability relations", cmd_observability);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    const RunConfig cfg = resolve(flags);
    CommandIo io{std::cout, {}};
    if (!flags.quiet) io.log = [](const std::string& s) { std::cerr << s << '\n'; };
    return chosen(cfg, io);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const CappedComputation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCapped;
  } catch (const NumericFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
