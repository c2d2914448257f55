#pragma once

// CSV tables and SVG line charts for run artifacts.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "aopinn/gp_bo.hpp"
#include "aopinn/pinn.hpp"
#include "aopinn/seir.hpp"

namespace aopinn::cli {

/// `epoch,train_loss,test_error,epsilon`
inline void write_train_record_csv(std::ostream& os, const TrainRecord& r) {
  char buf[160];
  os << "epoch,train_loss,test_error,epsilon\n";
  for (std::size_t k = 0; k < r.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", k + 1, r.train_loss[k], r.test_error[k], r.epsilon[k]);
    os << buf;
  }
}

inline std::vector<double> even_grid(double t_end, int points) {
  std::vector<double> ts;
  for (int k = 0; k < points; ++k) ts.push_back(t_end * k / (points - 1));
  return ts;
}

/// `t,S_true,E_true,I_true,R_true,S_pred,E_pred,I_pred,R_pred` on an even grid.
inline void write_predictions_csv(std::ostream& os, const PinnModel& model, const Trajectory& truth, int points) {
  const auto ts = even_grid(truth.times.back(), points);
  const Matrix pred = predict_values(model, ts);
  char buf[512];
  os << "t,S_true,E_true,I_true,R_true,S_pred,E_pred,I_pred,R_pred\n";
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const auto x = eval_at(truth, ts[k]);
    const auto r = static_cast<Index>(k);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", ts[k], x.s, x.e, x.i,
                  x.r, pred(r, 0), pred(r, 1), pred(r, 2), pred(r, 3));
    os << buf;
  }
}

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  int width = 720;
  int height = 440;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

}  // namespace detail

/// Static line chart with axes, five ticks per axis and a legend.
inline void write_svg_chart(std::ostream& os, const std::vector<Series>& series, const ChartOptions& opt) {
  using detail::num;
  const double left = 70, right = 170, top = 40, bottom = 50;
  const double pw = opt.width - left - right;
  const double ph = opt.height - top - bottom;
  auto ty = [&](double y) { return opt.log_y ? std::log10(y) : y; };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k]) || (opt.log_y && s.y[k] <= 0.0)) continue;
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, ty(s.y[k]));
      y1 = std::max(y1, ty(s.y[k]));
    }
  if (!(x1 >= x0)) x0 = 0, x1 = 1;
  if (!(y1 >= y0)) y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << opt.height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << detail::escape_xml(opt.title) << "</text>\n";
  os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0;
    const double fy = y0 + (y1 - y0) * k / 4.0;
    const double gx = left + pw * k / 4.0;
    const double gy = top + ph * (1.0 - k / 4.0);
    os << "<line x1=\"" << num(gx) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(gx) << "\" y2=\""
       << num(top + ph + 5) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(gx) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">" << num(fx)
       << "</text>\n";
    os << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(gy) << "\" x2=\"" << num(left) << "\" y2=\"" << num(gy)
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(left - 8) << "\" y=\"" << num(gy + 4) << "\" text-anchor=\"end\">"
       << (opt.log_y ? "1e" + num(fy) : num(fy)) << "</text>\n";
  }
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(opt.height - 10) << "\" text-anchor=\"middle\">"
     << detail::escape_xml(opt.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << num(top + ph / 2) << ")\">" << detail::escape_xml(opt.y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    std::string pts;
    for (std::size_t k = 0; k < ser.x.size(); ++k) {
      if (!std::isfinite(ser.x[k]) || !std::isfinite(ser.y[k]) || (opt.log_y && ser.y[k] <= 0.0)) continue;
      pts += num(px(ser.x[k])) + ',' + num(py(ser.y[k])) + ' ';
    }
    os << "<polyline fill=\"none\" stroke=\"" << ser.color << "\" stroke-width=\"1.5\""
       << (ser.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"" << pts << "\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(s);
    os << "<line x1=\"" << num(left + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(left + pw + 36)
       << "\" y2=\"" << num(ly) << "\" stroke=\"" << ser.color << "\" stroke-width=\"1.5\""
       << (ser.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    os << "<text x=\"" << num(left + pw + 42) << "\" y=\"" << num(ly + 4) << "\">" << detail::escape_xml(ser.name)
       << "</text>\n";
  }
  os << "</svg>\n";
}

inline const char* compartment_color(int c) {
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#d62728", "#2ca02c"};
  return colors[c];
}

/// Ground truth (solid) against the network (dashed) for all four compartments.
inline void write_trajectory_chart(std::ostream& os, const PinnModel& model, const Trajectory& truth, int points,
                                   const std::string& title) {
  const auto ts = even_grid(truth.times.back(), points);
  const Matrix pred = predict_values(model, ts);
  static const char* names[] = {"S", "E", "I", "R"};
  std::vector<Series> series;
  for (int c = 0; c < 4; ++c) {
    Series t{std::string(names[c]) + " true", ts, {}, compartment_color(c), false};
    Series p{std::string(names[c]) + " PINN", ts, {}, compartment_color(c), true};
    for (std::size_t k = 0; k < ts.size(); ++k) {
      t.y.push_back(eval_at(truth, ts[k]).to_array()[static_cast<std::size_t>(c)]);
      p.y.push_back(pred(static_cast<Index>(k), c));
    }
    series.push_back(std::move(t));
    series.push_back(std::move(p));
  }
  write_svg_chart(os, series, {title, "t", "population ratio"});
}

inline void write_simulation_chart(std::ostream& os, const Trajectory& traj) {
  static const char* names[] = {"S", "E", "I", "R"};
  std::vector<Series> series;
  for (int c = 0; c < 4; ++c) {
    Series s{names[c], traj.times, {}, compartment_color(c), false};
    for (const auto& x : traj.states) s.y.push_back(x.to_array()[static_cast<std::size_t>(c)]);
    series.push_back(std::move(s));
  }
  write_svg_chart(os, series, {"SEIR ground truth", "t", "population ratio"});
}

inline void write_bo_chart(std::ostream& os, const BoResult& r) {
  Series obj{"objective", {}, {}, "#1f77b4", false};
  Series best{"best so far", {}, {}, "#d62728", true};
  for (std::size_t k = 0; k < r.evaluations.size(); ++k) {
    obj.x.push_back(r.evaluations[k].iteration);
    obj.y.push_back(r.evaluations[k].objective);
    best.x.push_back(r.evaluations[k].iteration);
    best.y.push_back(r.best_trace[k]);
  }
  write_svg_chart(os, {obj, best}, {"GP-BO objective", "iteration", "min test error", true});
}

inline void write_loss_chart(std::ostream& os, const TrainRecord& r, const std::string& title) {
  Series train{"train loss", {}, {}, "#1f77b4", false};
  Series test{"test error", {}, {}, "#ff7f0e", false};
  const std::size_t stride = std::max<std::size_t>(1, r.size() / 2000);
  for (std::size_t k = 0; k < r.size(); k += stride) {
    train.x.push_back(static_cast<double>(k + 1));
    train.y.push_back(r.train_loss[k]);
    test.x.push_back(static_cast<double>(k + 1));
    test.y.push_back(r.test_error[k]);
  }
  write_svg_chart(os, {train, test}, {title, "epoch", "loss", true});
}

inline void write_epsilon_chart(std::ostream& os, const TrainRecord& r, double epsilon_true) {
  Series eps{"trained epsilon", {}, {}, "#1f77b4", false};
  const std::size_t stride = std::max<std::size_t>(1, r.size() / 2000);
  for (std::size_t k = 0; k < r.size(); k += stride) {
    eps.x.push_back(static_cast<double>(k + 1));
    eps.y.push_back(r.epsilon[k]);
  }
  const double n = static_cast<double>(std::max<std::size_t>(r.size(), 1));
  Series truth{"true epsilon", {1.0, n}, {epsilon_true, epsilon_true}, "#2ca02c", true};
  std::vector<Series> s{eps, truth};
  if (!r.empty()) {
    const double e1 = static_cast<double>(r.min_test_epoch());
    const double e2 = static_cast<double>(r.min_train_epoch());
    s.push_back({"min test epoch", {e1, e1}, {r.epsilon_at_min_test(), r.epsilon_at_min_test()}, "#ff7f0e", false});
    s.push_back({"min train epoch", {e2, e2}, {r.epsilon_at_min_train(), r.epsilon_at_min_train()}, "#d62728", false});
  }
  write_svg_chart(os, s, {"Trainable epsilon during baseline training", "epoch", "epsilon"});
}

}  // namespace aopinn::cli
