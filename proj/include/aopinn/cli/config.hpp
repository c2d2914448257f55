#pragma once

// Run configuration: a `key = value` text file whose defaults reproduce the
// reference experiment. Unknown keys and malformed values are rejected.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "aopinn/errors.hpp"
#include "aopinn/gp_bo.hpp"
#include "aopinn/pinn.hpp"
#include "aopinn/seir.hpp"

namespace aopinn::cli {

struct RunConfig {
  // scenario
  double beta = 0.26;
  double gamma = 0.1;
  double epsilon_true = 0.2;
  double s0 = 0.99, e0 = 0.0, i0 = 0.01, r0 = 0.0;
  double t_end = 200.0;
  double dt = 0.2;
  int n_train = 50;
  int n_test = 50;
  // seeds
  std::uint64_t seed_data = 1;
  std::uint64_t seed_init = 1;
  std::uint64_t seed_bo = 1;
  // network and training
  std::vector<int> hidden{50, 50, 50};
  double time_scale = 200.0;
  long epochs = 30000;
  double learning_rate = 1e-3;
  double lambda_data = 1.0, lambda_eq = 1.0, lambda_init = 1.0;
  double c_s = 1.0, c_e = 1.0, c_i = 1.0, c_r = 1.0;
  double baseline_c_i = 1.0;
  /// Fixed onset rate for `train-forward`.
  double forward_epsilon = 0.2;
  /// Starting value of the trainable onset rate for `train-inverse`.
  double inverse_epsilon_init = 0.1;
  // Bayesian optimization
  int bo_iterations = 30;
  int bo_init = 5;
  double bo_lo = 0.0;
  double bo_hi = 0.5;
  double bo_xi = 0.01;
  bool bo_log_objective = true;
  // output
  int plot_points = 201;
  std::string out_dir = "out";

  [[nodiscard]] EpiParams truth() const { return {beta, epsilon_true, gamma}; }
  [[nodiscard]] SeirState initial_state() const { return {s0, e0, i0, r0}; }
  [[nodiscard]] Architecture architecture() const {
    Architecture a;
    a.hidden = hidden;
    a.time_scale = time_scale;
    return a;
  }
  [[nodiscard]] LossWeights proposed_weights() const {
    return {c_s, c_e, c_i, c_r, lambda_data, lambda_eq, lambda_init};
  }
  [[nodiscard]] LossWeights baseline_weights() const {
    return {0.0, 0.0, baseline_c_i, 0.0, lambda_data, lambda_eq, lambda_init};
  }
  [[nodiscard]] BoOptions bo_options() const {
    BoOptions o;
    o.iterations = bo_iterations;
    o.init_count = bo_init;
    o.lo = bo_lo;
    o.hi = bo_hi;
    o.seed = seed_bo;
    o.xi = bo_xi;
    o.log_objective = bo_log_objective;
    return o;
  }
  [[nodiscard]] TrainOptions train_options(TrainMode mode) const {
    TrainOptions o;
    o.mode = mode;
    o.weights = mode == TrainMode::proposed ? proposed_weights() : baseline_weights();
    o.epochs = epochs;
    o.learning_rate = learning_rate;
    return o;
  }

  void validate() const;
  /// Every key with its resolved value, in a fixed order.
  [[nodiscard]] std::vector<std::pair<std::string, std::string>> entries() const;
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ValidationError("config: bad value for " + key + ": '" + text + "'");
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ValidationError("config: bad boolean for " + key + ": '" + text + "'");
}

inline std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<int>(key, trim(item)));
  return out;
}

/// Field accessors keyed by name; one table drives parsing and printing.
struct Field {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field member(T RunConfig::*m) {
  Field f;
  f.set = [m](RunConfig& c, const std::string& k, const std::string& v) {
    if constexpr (std::is_same_v<T, double>) c.*m = parse_number<double>(k, v);
    else if constexpr (std::is_same_v<T, bool>) c.*m = parse_bool(k, v);
    else if constexpr (std::is_same_v<T, std::string>) c.*m = v;
    else if constexpr (std::is_same_v<T, std::vector<int>>) c.*m = parse_int_list(k, v);
    else c.*m = parse_number<T>(k, v);
  };
  f.get = [m](const RunConfig& c) -> std::string {
    if constexpr (std::is_same_v<T, double>) return fmt_double(c.*m);
    else if constexpr (std::is_same_v<T, bool>) return c.*m ? "true" : "false";
    else if constexpr (std::is_same_v<T, std::string>) return c.*m;
    else if constexpr (std::is_same_v<T, std::vector<int>>) {
      std::string s;
      for (int w : c.*m) s += (s.empty() ? "" : ",") + std::to_string(w);
      return s;
    } else return std::to_string(c.*m);
  };
  return f;
}

inline const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table{
      {"beta", member(&RunConfig::beta)},
      {"gamma", member(&RunConfig::gamma)},
      {"epsilon_true", member(&RunConfig::epsilon_true)},
      {"s0", member(&RunConfig::s0)},
      {"e0", member(&RunConfig::e0)},
      {"i0", member(&RunConfig::i0)},
      {"r0", member(&RunConfig::r0)},
      {"t_end", member(&RunConfig::t_end)},
      {"dt", member(&RunConfig::dt)},
      {"n_train", member(&RunConfig::n_train)},
      {"n_test", member(&RunConfig::n_test)},
      {"seed_data", member(&RunConfig::seed_data)},
      {"seed_init", member(&RunConfig::seed_init)},
      {"seed_bo", member(&RunConfig::seed_bo)},
      {"hidden", member(&RunConfig::hidden)},
      {"time_scale", member(&RunConfig::time_scale)},
      {"epochs", member(&RunConfig::epochs)},
      {"learning_rate", member(&RunConfig::learning_rate)},
      {"lambda_data", member(&RunConfig::lambda_data)},
      {"lambda_eq", member(&RunConfig::lambda_eq)},
      {"lambda_init", member(&RunConfig::lambda_init)},
      {"c_s", member(&RunConfig::c_s)},
      {"c_e", member(&RunConfig::c_e)},
      {"c_i", member(&RunConfig::c_i)},
      {"c_r", member(&RunConfig::c_r)},
      {"baseline_c_i", member(&RunConfig::baseline_c_i)},
      {"forward_epsilon", member(&RunConfig::forward_epsilon)},
      {"inverse_epsilon_init", member(&RunConfig::inverse_epsilon_init)},
      {"bo_iterations", member(&RunConfig::bo_iterations)},
      {"bo_init", member(&RunConfig::bo_init)},
      {"bo_lo", member(&RunConfig::bo_lo)},
      {"bo_hi", member(&RunConfig::bo_hi)},
      {"bo_xi", member(&RunConfig::bo_xi)},
      {"bo_log_objective", member(&RunConfig::bo_log_objective)},
      {"plot_points", member(&RunConfig::plot_points)},
      {"out_dir", member(&RunConfig::out_dir)},
  };
  return table;
}

}  // namespace detail

/// Sets one key; throws ValidationError for unknown keys or malformed values.
inline void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& [name, field] : detail::fields())
    if (name == key) {
      field.set(cfg, key, value);
      return;
    }
  throw ValidationError("config: unknown key '" + key + "'");
}

/// Applies a `key=value` override.
inline void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ValidationError("override expects key=value, got '" + assignment + "'");
  set_config_value(cfg, detail::trim(assignment.substr(0, eq)), detail::trim(assignment.substr(eq + 1)));
}

inline RunConfig parse_config(std::istream& in, RunConfig cfg = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
    set_config_value(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path + "'");
  return parse_config(in);
}

inline std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [name, field] : detail::fields()) out.emplace_back(name, field.get(*this));
  return out;
}

inline void write_config(std::ostream& os, const RunConfig& cfg) {
  for (const auto& [k, v] : cfg.entries()) os << k << " = " << v << '\n';
}

inline void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ValidationError("config: " + what);
  };
  auto finite = [](double v) { return std::isfinite(v); };
  truth().validate();
  initial_state().validate();
  require(finite(t_end) && t_end > 0.0, "t_end must be positive");
  require(finite(dt) && dt > 0.0 && dt <= t_end, "dt must lie in (0, t_end]");
  require(n_train >= 2, "n_train must be at least 2");
  require(n_test >= 1, "n_test must be at least 1");
  architecture().validate();
  require(epochs >= 0, "epochs must be >= 0");
  require(finite(learning_rate) && learning_rate > 0.0, "learning_rate must be positive");
  proposed_weights().validate();
  baseline_weights().validate();
  require(baseline_c_i > 0.0, "baseline_c_i must be positive");
  require(finite(forward_epsilon) && forward_epsilon > 0.0, "forward_epsilon must be positive");
  require(finite(inverse_epsilon_init), "inverse_epsilon_init must be finite");
  require(bo_init >= 1 && bo_iterations >= bo_init, "need bo_iterations >= bo_init >= 1");
  require(finite(bo_lo) && finite(bo_hi) && bo_lo >= 0.0 && bo_hi > bo_lo, "need 0 <= bo_lo < bo_hi");
  require(finite(bo_xi) && bo_xi >= 0.0, "bo_xi must be >= 0");
  require(plot_points >= 2, "plot_points must be at least 2");
  require(!out_dir.empty(), "out_dir must not be empty");
}

}  // namespace aopinn::cli
