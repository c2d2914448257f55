#pragma once

// Physics-informed network for the SEIR system: a 1 -> hidden -> 4 tanh MLP,
// the composite data/equation/initial-condition loss, Adam, and the training
// loop for the fixed-epsilon (proposed) and trainable-epsilon (baseline) modes.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aopinn/diffkit/tape.hpp"
#include "aopinn/errors.hpp"
#include "aopinn/rng.hpp"
#include "aopinn/seir.hpp"

namespace aopinn {

using diffkit::Index;
using diffkit::Matrix;
using diffkit::Tape;
using diffkit::Var;
using diffkit::Vector;

/// Hidden widths and the input normalization scale (t is fed as t / time_scale).
struct Architecture {
  std::vector<int> hidden{50, 50, 50};
  double time_scale = 200.0;

  static constexpr int kOutputs = 4;

  [[nodiscard]] std::vector<int> widths() const {
    std::vector<int> w{1};
    w.insert(w.end(), hidden.begin(), hidden.end());
    w.push_back(kOutputs);
    return w;
  }

  [[nodiscard]] Index network_parameter_count() const {
    const auto w = widths();
    Index n = 0;
    for (std::size_t l = 0; l + 1 < w.size(); ++l) n += Index{w[l]} * w[l + 1] + w[l + 1];
    return n;
  }

  void validate() const {
    if (hidden.empty()) throw ValidationError("Architecture: at least one hidden layer required");
    for (int h : hidden)
      if (h <= 0) throw ValidationError("Architecture: hidden widths must be positive");
    if (!(time_scale > 0.0)) throw ValidationError("Architecture: time_scale must be positive");
  }
};

/// Weights and biases stored in one flat vector; layer l holds W_l (fan_out x
/// fan_in, column-major) followed by b_l. A trainable epsilon, when present, is
/// the last entry.
class PinnModel {
 public:
  struct Layer {
    Index weight_offset;
    Index bias_offset;
    int fan_in;
    int fan_out;
  };

  PinnModel() : PinnModel(Architecture{}) {}

  explicit PinnModel(Architecture arch, std::optional<double> trainable_epsilon = std::nullopt)
      : arch_(std::move(arch)) {
    arch_.validate();
    const auto w = arch_.widths();
    Index off = 0;
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
      layers_.push_back({off, off + Index{w[l]} * w[l + 1], w[l], w[l + 1]});
      off += Index{w[l]} * w[l + 1] + w[l + 1];
    }
    network_count_ = off;
    params_ = Vector::Zero(off + (trainable_epsilon ? 1 : 0));
    if (trainable_epsilon) params_[off] = *trainable_epsilon;
  }

  [[nodiscard]] const Architecture& architecture() const { return arch_; }
  [[nodiscard]] const std::vector<Layer>& layers() const { return layers_; }
  [[nodiscard]] Index network_parameter_count() const { return network_count_; }
  [[nodiscard]] Index parameter_count() const { return params_.size(); }
  [[nodiscard]] bool has_trainable_epsilon() const { return params_.size() > network_count_; }

  [[nodiscard]] const Vector& parameters() const { return params_; }
  Vector& parameters() { return params_; }

  void set_parameters(const Vector& p) {
    if (p.size() != params_.size()) throw ValidationError("PinnModel: parameter count mismatch");
    params_ = p;
  }

  [[nodiscard]] Index epsilon_index() const {
    if (!has_trainable_epsilon()) throw ValidationError("PinnModel: epsilon is not trainable");
    return network_count_;
  }
  [[nodiscard]] double epsilon() const { return params_[epsilon_index()]; }
  void set_epsilon(double eps) { params_[epsilon_index()] = eps; }

  [[nodiscard]] Eigen::Map<const Matrix> weight(std::size_t l) const {
    const auto& L = layers_[l];
    return {params_.data() + L.weight_offset, L.fan_out, L.fan_in};
  }
  [[nodiscard]] Eigen::Map<const Vector> bias(std::size_t l) const {
    const auto& L = layers_[l];
    return {params_.data() + L.bias_offset, L.fan_out};
  }

 private:
  Architecture arch_;
  std::vector<Layer> layers_;
  Index network_count_ = 0;
  Vector params_;
};

/// Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases.
inline PinnModel init_glorot(std::uint64_t seed, const Architecture& arch = {},
                             std::optional<double> trainable_epsilon = std::nullopt) {
  PinnModel model(arch, trainable_epsilon);
  CounterRng rng(seed);
  auto& p = model.parameters();
  for (const auto& L : model.layers()) {
    const double bound = std::sqrt(6.0 / static_cast<double>(L.fan_in + L.fan_out));
    for (Index k = 0; k < Index{L.fan_in} * L.fan_out; ++k)
      p[L.weight_offset + k] = rng.uniform(-bound, bound);
  }
  return model;
}

// ---------------------------------------------------------------------------
// Forward passes

/// Network outputs (n x 4, columns S,E,I,R) with d/dt in original time units.
inline Var network_outputs(Tape& tape, const PinnModel& model, std::span<const double> times) {
  const double scale = model.architecture().time_scale;
  Matrix t(static_cast<Index>(times.size()), 1);
  for (std::size_t k = 0; k < times.size(); ++k) t(static_cast<Index>(k), 0) = times[k] / scale;
  Var h = tape.input(t, Matrix::Constant(t.rows(), 1, 1.0 / scale));
  const auto& layers = model.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& L = layers[l];
    Var w = tape.parameter(model.parameters(), L.weight_offset, L.fan_out, L.fan_in);
    Var b = tape.parameter(model.parameters(), L.bias_offset, L.fan_out, 1);
    h = tape.affine(h, w, b);
    if (l + 1 < layers.size()) h = tanh(h);
  }
  return h;
}

/// Values only, n x 4.
inline Matrix predict_values(const PinnModel& model, std::span<const double> times) {
  const double scale = model.architecture().time_scale;
  Matrix h(static_cast<Index>(times.size()), 1);
  for (std::size_t k = 0; k < times.size(); ++k) h(static_cast<Index>(k), 0) = times[k] / scale;
  const auto& layers = model.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Matrix z = h * model.weight(l).transpose();
    z.rowwise() += model.bias(l).transpose();
    h = (l + 1 < layers.size()) ? Matrix(z.array().tanh()) : std::move(z);
  }
  return h;
}

struct Prediction {
  std::array<double, 4> value{};  // S, E, I, R
  std::array<double, 4> deriv{};  // d/dt per unit of original time
};

inline Prediction predict(const PinnModel& model, double t) {
  Tape tape;
  const double times[1] = {t};
  const Var out = network_outputs(tape, model, times);
  Prediction p;
  for (int c = 0; c < 4; ++c) {
    p.value[static_cast<std::size_t>(c)] = out.value()(0, c);
    p.deriv[static_cast<std::size_t>(c)] = out.deriv()(0, c);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Losses

struct LossWeights {
  double c_s = 1.0;
  double c_e = 1.0;
  double c_i = 1.0;
  double c_r = 1.0;
  double lambda_data = 1.0;
  double lambda_eq = 1.0;
  double lambda_init = 1.0;

  /// Full pseudo-observation weights (1,1,1,1).
  static LossWeights proposed() { return {}; }
  /// I-only weights (0,0,1,0).
  static LossWeights baseline() { return {0.0, 0.0, 1.0, 0.0}; }

  [[nodiscard]] std::array<double, 4> compartment_weights() const { return {c_s, c_e, c_i, c_r}; }

  void validate() const {
    for (double v : {c_s, c_e, c_i, c_r, lambda_data, lambda_eq, lambda_init})
      if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("LossWeights: weights must be finite and >= 0");
  }
};

namespace detail {

/// Data column for compartment c; throws if pseudo-data is required but absent.
inline const std::vector<double>& data_column(const ObservationSet& obs, int c) {
  static constexpr const char* names[] = {"S", "E", "I", "R"};
  const std::optional<std::vector<double>>* pseudo = nullptr;
  switch (c) {
    case 0: pseudo = &obs.pseudo_s; break;
    case 1: pseudo = &obs.pseudo_e; break;
    case 2: return obs.i_obs;
    default: pseudo = &obs.pseudo_r; break;
  }
  if (!pseudo->has_value())
    throw ConfigurationError(std::string("loss_data: nonzero weight on ") + names[c] +
                             " but no pseudo-data present");
  return **pseudo;
}

inline Matrix column_matrix(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

}  // namespace detail

/// sum_c C_c * mean_i (d_c(t_i) - out_c(t_i))^2; compartments with C_c = 0 are skipped.
inline Var data_loss_term(Tape& tape, Var outputs, const ObservationSet& obs, const LossWeights& w) {
  const auto cw = w.compartment_weights();
  std::optional<Var> acc;
  for (int c = 0; c < 4; ++c) {
    if (cw[static_cast<std::size_t>(c)] == 0.0) continue;
    const Var data = tape.constant(detail::column_matrix(detail::data_column(obs, c)));
    const Var term = cw[static_cast<std::size_t>(c)] * mean(square(tape.column(outputs, c) - data));
    acc = acc ? *acc + term : term;
  }
  return acc ? *acc : tape.constant(Matrix::Zero(1, 1));
}

/// Mean over collocation points of the five squared SEIR residuals. `epsilon_var`
/// replaces params.epsilon when the onset rate is trainable.
inline Var equation_loss_term(Tape& tape, Var outputs, const EpiParams& params,
                              std::optional<Var> epsilon_var = std::nullopt) {
  const Var s = tape.column(outputs, 0);
  const Var e = tape.column(outputs, 1);
  const Var i = tape.column(outputs, 2);
  const Var r = tape.column(outputs, 3);
  const Var infection = params.beta * (s * i);
  const Var onset = epsilon_var ? tape.mul_scalar(e, *epsilon_var) : params.epsilon * e;
  const Var removal = params.gamma * i;

  const Var res_s = time_deriv(s) + infection;
  const Var res_e = time_deriv(e) - (infection - onset);
  const Var res_i = time_deriv(i) - (onset - removal);
  const Var res_r = time_deriv(r) - removal;
  const Var res_sum = (s + e + i + r) - 1.0;
  return mean(square(res_s)) + mean(square(res_e)) + mean(square(res_i)) + mean(square(res_r)) +
         mean(square(res_sum));
}

/// Mean of the four squared errors of the outputs at t = 0 (a 1 x 4 node).
inline Var initial_loss_term(Tape& tape, Var outputs_at_zero, const SeirState& init) {
  Matrix target(1, 4);
  target << init.s, init.e, init.i, init.r;
  return mean(square(outputs_at_zero - tape.constant(target)));
}

inline std::optional<Var> epsilon_node(Tape& tape, const PinnModel& model) {
  if (!model.has_trainable_epsilon()) return std::nullopt;
  return tape.parameter(model.parameters(), model.epsilon_index(), 1, 1);
}

/// lambda_data*L_data + lambda_eq*L_eq + lambda_init*L_init with collocation at obs.times.
inline Var total_loss_term(Tape& tape, const PinnModel& model, const ObservationSet& obs,
                           const EpiParams& params, const SeirState& init, const LossWeights& w) {
  std::optional<Var> acc;
  auto add = [&](double lambda, Var term) {
    const Var weighted = lambda * term;
    acc = acc ? *acc + weighted : weighted;
  };
  if (w.lambda_data != 0.0 || w.lambda_eq != 0.0) {
    const Var out = network_outputs(tape, model, obs.times);
    if (w.lambda_data != 0.0) add(w.lambda_data, data_loss_term(tape, out, obs, w));
    if (w.lambda_eq != 0.0) add(w.lambda_eq, equation_loss_term(tape, out, params, epsilon_node(tape, model)));
  }
  if (w.lambda_init != 0.0) {
    const double zero[1] = {0.0};
    add(w.lambda_init, initial_loss_term(tape, network_outputs(tape, model, zero), init));
  }
  return acc ? *acc : tape.constant(Matrix::Zero(1, 1));
}

inline double loss_data(const PinnModel& model, const ObservationSet& obs, const LossWeights& w) {
  Tape tape;
  return data_loss_term(tape, network_outputs(tape, model, obs.times), obs, w).scalar();
}

inline double loss_eq(const PinnModel& model, std::span<const double> times, const EpiParams& params) {
  Tape tape;
  const Var out = network_outputs(tape, model, times);
  return equation_loss_term(tape, out, params, epsilon_node(tape, model)).scalar();
}

inline double loss_init(const PinnModel& model, const SeirState& init) {
  Tape tape;
  const double zero[1] = {0.0};
  return initial_loss_term(tape, network_outputs(tape, model, zero), init).scalar();
}

inline double total_loss(const PinnModel& model, const ObservationSet& obs, const EpiParams& params,
                         const SeirState& init, const LossWeights& w) {
  Tape tape;
  return total_loss_term(tape, model, obs, params, init, w).scalar();
}

inline diffkit::GradientResult total_loss_gradient(const PinnModel& model, const ObservationSet& obs,
                                                   const EpiParams& params, const SeirState& init,
                                                   const LossWeights& w) {
  Tape tape;
  const Var loss = total_loss_term(tape, model, obs, params, init, w);
  return {loss.scalar(), tape.gradient(loss, model.parameter_count())};
}

/// Values-only data loss, used for per-epoch test error.
inline double data_error(const PinnModel& model, const ObservationSet& obs, const LossWeights& w) {
  const Matrix out = predict_values(model, obs.times);
  const auto cw = w.compartment_weights();
  double total = 0.0;
  for (int c = 0; c < 4; ++c) {
    if (cw[static_cast<std::size_t>(c)] == 0.0) continue;
    const auto& d = detail::data_column(obs, c);
    double acc = 0.0;
    for (Index k = 0; k < out.rows(); ++k) {
      const double diff = d[static_cast<std::size_t>(k)] - out(k, c);
      acc += diff * diff;
    }
    total += cw[static_cast<std::size_t>(c)] * acc / static_cast<double>(out.rows());
  }
  return total;
}

// ---------------------------------------------------------------------------
// Adam

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  Vector m;
  Vector v;
  long step = 0;
};

inline void adam_step(Vector& params, const Vector& grads, AdamState& state, double lr,
                      const AdamConfig& cfg = {}) {
  if (grads.size() != params.size()) throw ValidationError("adam_step: gradient size mismatch");
  for (Index k = 0; k < grads.size(); ++k)
    if (!std::isfinite(grads[k]))
      throw NumericFailure("adam_step: non-finite gradient entry " + std::to_string(k) + " at step " +
                           std::to_string(state.step + 1));
  if (state.m.size() != params.size()) {
    state.m = Vector::Zero(params.size());
    state.v = Vector::Zero(params.size());
  }
  ++state.step;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grads;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grads.cwiseAbs2();
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  params.array() -= lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + cfg.eps);
}

// ---------------------------------------------------------------------------
// Training

enum class TrainMode { proposed, baseline };

inline const char* to_string(TrainMode m) { return m == TrainMode::proposed ? "proposed" : "baseline"; }

struct TrainOptions {
  TrainMode mode = TrainMode::proposed;
  LossWeights weights = LossWeights::proposed();
  long epochs = 30000;
  double learning_rate = 1e-3;
  AdamConfig adam{};
  /// Called after each recorded epoch with (epoch, train_loss, test_error, model
  /// before the update).
  std::function<void(long, double, double, const PinnModel&)> on_epoch;
};

/// Entry k describes epoch k+1: losses at the parameters before that epoch's update.
struct TrainRecord {
  std::vector<double> train_loss;
  std::vector<double> test_error;
  std::vector<double> epsilon;
  std::size_t min_test_index = 0;
  std::size_t min_train_index = 0;

  [[nodiscard]] std::size_t size() const { return train_loss.size(); }
  [[nodiscard]] bool empty() const { return train_loss.empty(); }
  [[nodiscard]] long min_test_epoch() const { return static_cast<long>(min_test_index) + 1; }
  [[nodiscard]] long min_train_epoch() const { return static_cast<long>(min_train_index) + 1; }
  [[nodiscard]] double min_test_error() const {
    return empty() ? std::numeric_limits<double>::infinity() : test_error[min_test_index];
  }
  [[nodiscard]] double min_train_loss() const {
    return empty() ? std::numeric_limits<double>::infinity() : train_loss[min_train_index];
  }
  [[nodiscard]] double epsilon_at_min_test() const { return epsilon.at(min_test_index); }
  [[nodiscard]] double epsilon_at_min_train() const { return epsilon.at(min_train_index); }

  void push(double train, double test, double eps) {
    train_loss.push_back(train);
    test_error.push_back(test);
    epsilon.push_back(eps);
    const std::size_t k = train_loss.size() - 1;
    if (test < test_error[min_test_index]) min_test_index = k;
    if (train < train_loss[min_train_index]) min_train_index = k;
  }
};

struct TrainResult {
  PinnModel model;          // after the last update
  TrainRecord record;
  PinnModel at_min_test;    // parameters of the min-test-error epoch
  PinnModel at_min_train;   // parameters of the min-train-loss epoch
};

/// Raised when training diverges; carries the record up to the last finite epoch.
class TrainingFailure : public NumericFailure {
 public:
  TrainingFailure(const std::string& what, TrainRecord record)
      : NumericFailure(what), record_(std::move(record)) {}
  [[nodiscard]] const TrainRecord& record() const { return record_; }

 private:
  TrainRecord record_;
};

inline void validate_training_setup(const PinnModel& model, const ObservationSet& train_obs,
                                    const ObservationSet& test_obs, const TrainOptions& opt) {
  opt.weights.validate();
  train_obs.validate();
  test_obs.validate();
  if (opt.epochs < 0) throw ValidationError("train: epochs must be >= 0");
  if (!(opt.learning_rate > 0.0)) throw ValidationError("train: learning rate must be positive");
  if (opt.mode == TrainMode::proposed) {
    if (model.has_trainable_epsilon())
      throw ValidationError("train: proposed mode uses a fixed epsilon");
    if (!train_obs.has_pseudo_data() || !test_obs.has_pseudo_data())
      throw ConfigurationError("train: proposed mode requires pseudo-data for S, E, R");
  } else {
    if (!model.has_trainable_epsilon())
      throw ValidationError("train: baseline mode requires a trainable epsilon");
    const auto& w = opt.weights;
    if (w.c_s != 0.0 || w.c_e != 0.0 || w.c_r != 0.0 || w.c_i == 0.0)
      throw ValidationError("train: baseline mode observes I only (C = (0,0,C_I,0))");
  }
}

/// Full-batch Adam. In proposed mode params.epsilon is the fixed onset rate;
/// in baseline mode the model's trainable epsilon is used and updated.
inline TrainResult train(PinnModel model, const ObservationSet& train_obs, const ObservationSet& test_obs,
                         const EpiParams& params, const SeirState& init, const TrainOptions& opt) {
  validate_training_setup(model, train_obs, test_obs, opt);
  TrainResult result{model, {}, model, model};
  AdamState adam;
  auto current_epsilon = [&] {
    return model.has_trainable_epsilon() ? model.epsilon() : params.epsilon;
  };

  for (long epoch = 1; epoch <= opt.epochs; ++epoch) {
    diffkit::GradientResult g;
    double test = 0.0;
    try {
      g = total_loss_gradient(model, train_obs, params, init, opt.weights);
      test = data_error(model, test_obs, opt.weights);
      if (!std::isfinite(g.value) || !std::isfinite(test))
        throw NumericFailure("non-finite loss");
    } catch (const NumericFailure& e) {
      throw TrainingFailure("train: numeric failure at epoch " + std::to_string(epoch) + ": " + e.what(),
                            result.record);
    }

    const std::size_t before_test = result.record.min_test_index;
    const std::size_t before_train = result.record.min_train_index;
    const bool first = result.record.empty();
    result.record.push(g.value, test, current_epsilon());
    if (first || result.record.min_test_index != before_test) result.at_min_test = model;
    if (first || result.record.min_train_index != before_train) result.at_min_train = model;
    if (opt.on_epoch) opt.on_epoch(epoch, g.value, test, model);

    try {
      adam_step(model.parameters(), g.gradient, adam, opt.learning_rate, opt.adam);
    } catch (const NumericFailure& e) {
      throw TrainingFailure(std::string("train: ") + e.what(), result.record);
    }
  }
  result.model = std::move(model);
  return result;
}

}  // namespace aopinn
