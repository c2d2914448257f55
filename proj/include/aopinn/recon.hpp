#pragma once

// Pseudo-observations of the unobserved compartments from I, dI/dt, d2I/dt2
// and a candidate onset rate, via the observability relations
//   E = (I' + gamma I) / eps
//   S = (I'' + (eps + gamma) I' + eps gamma I) / (beta eps I)
//   R = 1 - (S + E + I)

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "aopinn/errors.hpp"
#include "aopinn/seir.hpp"

namespace aopinn {

struct ReconConfig {
  double epsilon_candidate = 0.2;
  double beta = 0.26;
  double gamma = 0.1;
  double i_floor = 1e-12;

  void validate() const {
    if (!(beta > 0.0) || !(gamma > 0.0) || !std::isfinite(beta) || !std::isfinite(gamma))
      throw ValidationError("ReconConfig: beta and gamma must be positive");
    if (!(i_floor > 0.0)) throw ValidationError("ReconConfig: i_floor must be positive");
    if (!(epsilon_candidate > 0.0) || !std::isfinite(epsilon_candidate))
      throw DomainError("reconstruct: epsilon candidate must be positive, got " +
                        std::to_string(epsilon_candidate));
  }
};

inline ObservationSet reconstruct(ObservationSet obs, const ReconConfig& cfg) {
  cfg.validate();
  obs.validate();
  const double eps = cfg.epsilon_candidate;
  const auto n = obs.size();
  std::vector<double> s(n), e(n), r(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double i = obs.i_obs[k];
    if (!(std::abs(i) >= cfg.i_floor))
      throw SingularityError("reconstruct: |I| below floor at point " + std::to_string(k) +
                             " (t=" + std::to_string(obs.times[k]) + ")");
    const double di = obs.i_dot[k];
    const double ddi = obs.i_ddot[k];
    e[k] = (di + cfg.gamma * i) / eps;
    s[k] = (ddi + (eps + cfg.gamma) * di + eps * cfg.gamma * i) / (cfg.beta * eps * i);
    r[k] = 1.0 - (s[k] + e[k] + i);
  }
  obs.pseudo_s = std::move(s);
  obs.pseudo_e = std::move(e);
  obs.pseudo_r = std::move(r);
  return obs;
}

/// `t,I,dI,ddI,S_hat,E_hat,R_hat`; pseudo columns are empty when absent.
inline void write_observations_csv(std::ostream& os, const ObservationSet& obs) {
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  os << "t,I,dI,ddI,S_hat,E_hat,R_hat\n";
  for (std::size_t k = 0; k < obs.size(); ++k) {
    put(obs.times[k]);
    for (double v : {obs.i_obs[k], obs.i_dot[k], obs.i_ddot[k]}) {
      os << ',';
      put(v);
    }
    for (const auto* seq : {&obs.pseudo_s, &obs.pseudo_e, &obs.pseudo_r}) {
      os << ',';
      if (seq->has_value()) put((**seq)[k]);
    }
    os << '\n';
  }
}

}  // namespace aopinn
