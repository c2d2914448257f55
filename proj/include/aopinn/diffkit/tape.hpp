#pragma once

// Reverse-mode tape over Dual-valued matrices.
//
// Every node holds a value matrix and a deriv matrix (d/dt of the value, t being
// the scalar network input). Reverse sweeps propagate adjoints for both parts, so
// gradients of losses built from time derivatives (mixed d/dw d/dt terms) are
// exact. Rows index collocation points, columns index features.

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

#include "aopinn/errors.hpp"

namespace aopinn::diffkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class Op {
  parameter,   // leaf read from the flat parameter vector; constant in t
  input,       // leaf constant (no parameter dependence)
  affine,      // x * W^T + 1 b^T
  tanh,
  add,
  sub,
  mul,         // elementwise
  div,         // elementwise
  square,
  scale,       // c * x
  add_const,   // x + c
  mul_scalar,  // s * x with s a 1x1 node
  column,      // x(:, j)
  time_deriv,  // promotes deriv to value; the new deriv is not tracked (zero)
  mean,        // mean of all entries -> 1x1
  sum,         // sum of all entries -> 1x1
};

class Tape;

/// Handle to a tape node.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  [[nodiscard]] int id() const { return id_; }
  [[nodiscard]] Tape* tape() const { return tape_; }
  [[nodiscard]] const Matrix& value() const;
  [[nodiscard]] const Matrix& deriv() const;
  [[nodiscard]] Index rows() const { return value().rows(); }
  [[nodiscard]] Index cols() const { return value().cols(); }
  [[nodiscard]] double scalar() const { return value()(0, 0); }

 private:
  Tape* tape_ = nullptr;
  int id_ = -1;
};

class Tape {
 public:
  struct Node {
    Op op;
    int a = -1;
    int b = -1;
    int c = -1;
    double constant = 0.0;
    Index offset = 0;  // parameter offset or column index
    bool const_in_t = false;
    Matrix value;
    Matrix deriv;
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }

  /// A rows x cols column-major block of `flat` starting at `offset`.
  Var parameter(const Vector& flat, Index offset, Index rows, Index cols) {
    if (offset < 0 || offset + rows * cols > flat.size())
      throw ValidationError("Tape::parameter: block exceeds parameter vector");
    Node n{Op::parameter};
    n.offset = offset;
    n.const_in_t = true;
    n.value = Eigen::Map<const Matrix>(flat.data() + offset, rows, cols);
    n.deriv = Matrix::Zero(rows, cols);
    return push(std::move(n));
  }

  Var input(Matrix value, Matrix deriv) {
    if (value.rows() != deriv.rows() || value.cols() != deriv.cols())
      throw ValidationError("Tape::input: value/deriv shape mismatch");
    Node n{Op::input};
    n.const_in_t = deriv.isZero(0.0);
    n.value = std::move(value);
    n.deriv = std::move(deriv);
    return push(std::move(n));
  }

  Var constant(Matrix value) {
    Matrix zero = Matrix::Zero(value.rows(), value.cols());
    return input(std::move(value), std::move(zero));
  }

  Var affine(Var x, Var w, Var b) {
    const auto& X = val(x);
    const auto& W = val(w);
    const auto& B = val(b);
    if (X.cols() != W.cols() || B.size() != W.rows() || B.cols() != 1)
      throw ValidationError("Tape::affine: shape mismatch");
    Node n{Op::affine, x.id(), w.id(), b.id()};
    n.value = X * W.transpose();
    n.value.rowwise() += B.col(0).transpose();
    n.deriv = der(x) * W.transpose();
    if (!node(w.id()).const_in_t) n.deriv.noalias() += X * der(w).transpose();
    if (!node(b.id()).const_in_t) n.deriv.rowwise() += der(b).col(0).transpose();
    return push(std::move(n));
  }

  Var tanh(Var x) {
    Node n{Op::tanh, x.id()};
    n.value = val(x).array().tanh();
    n.deriv = (1.0 - n.value.array().square()) * der(x).array();
    return push(std::move(n));
  }

  Var add(Var x, Var y) {
    same_shape(x, y, "add");
    Node n{Op::add, x.id(), y.id()};
    n.value = val(x) + val(y);
    n.deriv = der(x) + der(y);
    return push(std::move(n));
  }

  Var sub(Var x, Var y) {
    same_shape(x, y, "sub");
    Node n{Op::sub, x.id(), y.id()};
    n.value = val(x) - val(y);
    n.deriv = der(x) - der(y);
    return push(std::move(n));
  }

  Var mul(Var x, Var y) {
    same_shape(x, y, "mul");
    Node n{Op::mul, x.id(), y.id()};
    n.value = val(x).cwiseProduct(val(y));
    n.deriv = der(x).cwiseProduct(val(y)) + val(x).cwiseProduct(der(y));
    return push(std::move(n));
  }

  Var div(Var x, Var y) {
    same_shape(x, y, "div");
    Node n{Op::div, x.id(), y.id()};
    n.value = val(x).cwiseQuotient(val(y));
    n.deriv = (der(x) - n.value.cwiseProduct(der(y))).cwiseQuotient(val(y));
    return push(std::move(n));
  }

  Var square(Var x) {
    Node n{Op::square, x.id()};
    n.value = val(x).array().square();
    n.deriv = 2.0 * val(x).cwiseProduct(der(x));
    return push(std::move(n));
  }

  Var scale(Var x, double c) {
    Node n{Op::scale, x.id()};
    n.constant = c;
    n.value = c * val(x);
    n.deriv = c * der(x);
    return push(std::move(n));
  }

  Var add_const(Var x, double c) {
    Node n{Op::add_const, x.id()};
    n.constant = c;
    n.value = val(x).array() + c;
    n.deriv = der(x);
    return push(std::move(n));
  }

  Var mul_scalar(Var x, Var s) {
    if (val(s).size() != 1) throw ValidationError("Tape::mul_scalar: s must be 1x1");
    Node n{Op::mul_scalar, x.id(), s.id()};
    const double sv = val(s)(0, 0);
    const double sd = der(s)(0, 0);
    n.value = sv * val(x);
    n.deriv = sv * der(x) + sd * val(x);
    return push(std::move(n));
  }

  Var column(Var x, Index j) {
    if (j < 0 || j >= val(x).cols()) throw ValidationError("Tape::column: index out of range");
    Node n{Op::column, x.id()};
    n.offset = j;
    n.value = val(x).col(j);
    n.deriv = der(x).col(j);
    return push(std::move(n));
  }

  Var time_deriv(Var x) {
    Node n{Op::time_deriv, x.id()};
    n.value = der(x);
    n.deriv = Matrix::Zero(n.value.rows(), n.value.cols());
    return push(std::move(n));
  }

  Var mean(Var x) {
    Node n{Op::mean, x.id()};
    const auto count = static_cast<double>(val(x).size());
    n.value = Matrix::Constant(1, 1, val(x).sum() / count);
    n.deriv = Matrix::Constant(1, 1, der(x).sum() / count);
    return push(std::move(n));
  }

  Var sum(Var x) {
    Node n{Op::sum, x.id()};
    n.value = Matrix::Constant(1, 1, val(x).sum());
    n.deriv = Matrix::Constant(1, 1, der(x).sum());
    return push(std::move(n));
  }

  /// d(loss.value)/d(parameter) for every entry of a flat parameter vector of
  /// length n_params. Entries never read by a parameter node stay exactly 0.
  /// Adjoints are accumulated in reverse creation order.
  [[nodiscard]] Vector gradient(Var loss, Index n_params) const {
    if (loss.tape() != this) throw ValidationError("Tape::gradient: foreign variable");
    if (val(loss).size() != 1) throw ValidationError("Tape::gradient: loss must be scalar");
    for (std::size_t k = 0; k <= static_cast<std::size_t>(loss.id()); ++k) {
      if (!nodes_[k].value.allFinite() || !nodes_[k].deriv.allFinite())
        throw NumericFailure("Tape::gradient: non-finite value at node " + std::to_string(k));
    }

    const auto last = static_cast<std::size_t>(loss.id());
    std::vector<Matrix> adj_v(last + 1), adj_d(last + 1);
    auto touch = [&](std::vector<Matrix>& adj, int id) -> Matrix& {
      auto& m = adj[static_cast<std::size_t>(id)];
      if (m.size() == 0) m = Matrix::Zero(nodes_[id].value.rows(), nodes_[id].value.cols());
      return m;
    };
    touch(adj_v, loss.id())(0, 0) = 1.0;

    Vector grad = Vector::Zero(n_params);
    for (std::size_t k = last + 1; k-- > 0;) {
      const Node& n = nodes_[k];
      const Matrix& gv = adj_v[k];
      const Matrix& gd = adj_d[k];
      const bool has_v = gv.size() != 0;
      const bool has_d = gd.size() != 0;
      if (!has_v && !has_d) continue;

      switch (n.op) {
        case Op::parameter: {
          if (has_v) {
            if (n.offset + gv.size() > n_params)
              throw ValidationError("Tape::gradient: parameter block exceeds n_params");
            Eigen::Map<Matrix>(grad.data() + n.offset, gv.rows(), gv.cols()) += gv;
          }
          break;
        }
        case Op::input:
          break;
        case Op::affine: {
          const Node& x = nodes_[n.a];
          const Node& w = nodes_[n.b];
          const Node& b = nodes_[n.c];
          if (has_v) {
            touch(adj_v, n.a).noalias() += gv * w.value;
            touch(adj_v, n.b).noalias() += gv.transpose() * x.value;
            touch(adj_v, n.c) += gv.colwise().sum().transpose();
          }
          if (has_d) {
            touch(adj_d, n.a).noalias() += gd * w.value;
            touch(adj_v, n.b).noalias() += gd.transpose() * x.deriv;
            if (!w.const_in_t) {
              touch(adj_v, n.a).noalias() += gd * w.deriv;
              touch(adj_d, n.b).noalias() += gd.transpose() * x.value;
            }
            if (!b.const_in_t) touch(adj_d, n.c) += gd.colwise().sum().transpose();
          }
          break;
        }
        case Op::tanh: {
          const Node& x = nodes_[n.a];
          const Eigen::ArrayXXd y = n.value.array();
          const Eigen::ArrayXXd slope = 1.0 - y.square();
          Eigen::ArrayXXd xv = Eigen::ArrayXXd::Zero(y.rows(), y.cols());
          if (has_v) xv += gv.array() * slope;
          if (has_d) {
            // deriv = slope * x.deriv, d(slope)/dx = -2 y slope
            xv += gd.array() * x.deriv.array() * (-2.0 * y * slope);
            touch(adj_d, n.a).array() += gd.array() * slope;
          }
          touch(adj_v, n.a).array() += xv;
          break;
        }
        case Op::add:
        case Op::sub: {
          const double sign = n.op == Op::add ? 1.0 : -1.0;
          if (has_v) {
            touch(adj_v, n.a) += gv;
            touch(adj_v, n.b) += sign * gv;
          }
          if (has_d) {
            touch(adj_d, n.a) += gd;
            touch(adj_d, n.b) += sign * gd;
          }
          break;
        }
        case Op::mul: {
          const Node& x = nodes_[n.a];
          const Node& y = nodes_[n.b];
          if (has_v) {
            touch(adj_v, n.a) += gv.cwiseProduct(y.value);
            touch(adj_v, n.b) += gv.cwiseProduct(x.value);
          }
          if (has_d) {
            touch(adj_v, n.a) += gd.cwiseProduct(y.deriv);
            touch(adj_v, n.b) += gd.cwiseProduct(x.deriv);
            touch(adj_d, n.a) += gd.cwiseProduct(y.value);
            touch(adj_d, n.b) += gd.cwiseProduct(x.value);
          }
          break;
        }
        case Op::div: {
          const Node& x = nodes_[n.a];
          const Node& y = nodes_[n.b];
          const Eigen::ArrayXXd inv = y.value.array().inverse();
          const Eigen::ArrayXXd z = n.value.array();
          if (has_v) {
            touch(adj_v, n.a).array() += gv.array() * inv;
            touch(adj_v, n.b).array() -= gv.array() * z * inv;
          }
          if (has_d) {
            // deriv = (xd - z yd) / y
            const Eigen::ArrayXXd zd = n.deriv.array();
            touch(adj_d, n.a).array() += gd.array() * inv;
            touch(adj_d, n.b).array() -= gd.array() * z * inv;
            touch(adj_v, n.a).array() -= gd.array() * y.deriv.array() * inv.square();
            touch(adj_v, n.b).array() -=
                gd.array() * (zd * inv - z * y.deriv.array() * inv.square());
            (void)x;
          }
          break;
        }
        case Op::square: {
          const Node& x = nodes_[n.a];
          if (has_v) touch(adj_v, n.a) += 2.0 * gv.cwiseProduct(x.value);
          if (has_d) {
            touch(adj_v, n.a) += 2.0 * gd.cwiseProduct(x.deriv);
            touch(adj_d, n.a) += 2.0 * gd.cwiseProduct(x.value);
          }
          break;
        }
        case Op::scale:
          if (has_v) touch(adj_v, n.a) += n.constant * gv;
          if (has_d) touch(adj_d, n.a) += n.constant * gd;
          break;
        case Op::add_const:
          if (has_v) touch(adj_v, n.a) += gv;
          if (has_d) touch(adj_d, n.a) += gd;
          break;
        case Op::mul_scalar: {
          const Node& x = nodes_[n.a];
          const Node& s = nodes_[n.b];
          const double sv = s.value(0, 0);
          const double sd = s.deriv(0, 0);
          if (has_v) {
            touch(adj_v, n.a) += sv * gv;
            touch(adj_v, n.b)(0, 0) += gv.cwiseProduct(x.value).sum();
          }
          if (has_d) {
            touch(adj_d, n.a) += sv * gd;
            touch(adj_v, n.a) += sd * gd;
            touch(adj_v, n.b)(0, 0) += gd.cwiseProduct(x.deriv).sum();
            touch(adj_d, n.b)(0, 0) += gd.cwiseProduct(x.value).sum();
          }
          break;
        }
        case Op::column:
          if (has_v) touch(adj_v, n.a).col(n.offset) += gv.col(0);
          if (has_d) touch(adj_d, n.a).col(n.offset) += gd.col(0);
          break;
        case Op::time_deriv:
          if (has_v) touch(adj_d, n.a) += gv;
          break;
        case Op::mean:
        case Op::sum: {
          const Node& x = nodes_[n.a];
          const double w = n.op == Op::mean ? 1.0 / static_cast<double>(x.value.size()) : 1.0;
          if (has_v) touch(adj_v, n.a).array() += w * gv(0, 0);
          if (has_d) touch(adj_d, n.a).array() += w * gd(0, 0);
          break;
        }
      }
    }
    return grad;
  }

 private:
  friend class Var;

  Var push(Node n) {
    nodes_.push_back(std::move(n));
    return {this, static_cast<int>(nodes_.size()) - 1};
  }

  const Matrix& val(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id())).value; }
  const Matrix& der(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id())).deriv; }

  void same_shape(Var x, Var y, const char* what) const {
    if (val(x).rows() != val(y).rows() || val(x).cols() != val(y).cols())
      throw ValidationError(std::string("Tape::") + what + ": shape mismatch");
  }

  std::vector<Node> nodes_;
};

inline const Matrix& Var::value() const { return tape_->node(id_).value; }
inline const Matrix& Var::deriv() const { return tape_->node(id_).deriv; }

inline Var operator+(Var x, Var y) { return x.tape()->add(x, y); }
inline Var operator-(Var x, Var y) { return x.tape()->sub(x, y); }
inline Var operator*(Var x, Var y) { return x.tape()->mul(x, y); }
inline Var operator/(Var x, Var y) { return x.tape()->div(x, y); }
inline Var operator*(double c, Var x) { return x.tape()->scale(x, c); }
inline Var operator*(Var x, double c) { return x.tape()->scale(x, c); }
inline Var operator+(Var x, double c) { return x.tape()->add_const(x, c); }
inline Var operator-(Var x, double c) { return x.tape()->add_const(x, -c); }
inline Var tanh(Var x) { return x.tape()->tanh(x); }
inline Var square(Var x) { return x.tape()->square(x); }
inline Var mean(Var x) { return x.tape()->mean(x); }
inline Var sum(Var x) { return x.tape()->sum(x); }
inline Var time_deriv(Var x) { return x.tape()->time_deriv(x); }

struct GradientResult {
  double value = 0.0;
  Vector gradient;
};

/// Records `loss_fn(tape, params)` on a fresh tape and returns the loss value
/// with its gradient over the whole flat parameter vector.
template <class LossFn>
GradientResult gradient(LossFn&& loss_fn, const Vector& params) {
  Tape tape;
  const Var loss = std::forward<LossFn>(loss_fn)(tape, params);
  return {loss.scalar(), tape.gradient(loss, params.size())};
}

}  // namespace aopinn::diffkit
