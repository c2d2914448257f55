#include <gtest/gtest.h>

#include <sstream>

#include "aopinn/recon.hpp"
#include "oracles.hpp"

using namespace aopinn;

namespace {

ObservationSet single_point(double i, double di, double ddi) {
  ObservationSet obs;
  obs.times = {0.0};
  obs.i_obs = {i};
  obs.i_dot = {di};
  obs.i_ddot = {ddi};
  return obs;
}

const Trajectory& truth() {
  static const Trajectory traj = simulate(oracle::paper_params(), oracle::paper_init(), 200.0, 0.2);
  return traj;
}

}  // namespace

TEST(Reconstruct, InitialPointWithTrueEpsilon) {
  const auto out = reconstruct(single_point(0.01, -0.001, 0.0006148), {0.2, 0.26, 0.1});
  EXPECT_NEAR((*out.pseudo_s)[0], 0.99, 1e-12);
  EXPECT_NEAR((*out.pseudo_e)[0], 0.0, 1e-15);
  EXPECT_NEAR((*out.pseudo_r)[0], 0.0, 1e-12);
}

TEST(Reconstruct, InitialPointWithWrongEpsilon) {
  const auto out = reconstruct(single_point(0.01, -0.001, 0.0006148), {0.4, 0.26, 0.1});
  EXPECT_NEAR((*out.pseudo_e)[0], 0.0, 1e-15);
  EXPECT_NEAR((*out.pseudo_s)[0], 0.495, 1e-12);
}

TEST(Reconstruct, RoundTripAgainstSimulator) {
  const auto p = oracle::paper_params();
  for (auto mode : {SampleMode::train, SampleMode::test}) {
    const auto obs = reconstruct(sample_observations(truth(), p, 50, mode, 3), {0.2, 0.26, 0.1});
    for (std::size_t k = 0; k < obs.size(); ++k) {
      const auto x = eval_at(truth(), obs.times[k]);
      EXPECT_NEAR((*obs.pseudo_s)[k], x.s, 1e-6);
      EXPECT_NEAR((*obs.pseudo_e)[k], x.e, 1e-6);
      EXPECT_NEAR((*obs.pseudo_r)[k], x.r, 1e-6);
    }
  }
}

TEST(Reconstruct, PseudoCompartmentsSumToOne) {
  const auto obs = reconstruct(sample_observations(truth(), oracle::paper_params(), 50, SampleMode::train, 0),
                               {0.33, 0.26, 0.1});
  for (std::size_t k = 0; k < obs.size(); ++k)
    EXPECT_NEAR((*obs.pseudo_s)[k] + (*obs.pseudo_e)[k] + obs.i_obs[k] + (*obs.pseudo_r)[k], 1.0, 1e-15);
}

TEST(Reconstruct, ExposedScalesInverselyWithEpsilon) {
  const auto raw = sample_observations(truth(), oracle::paper_params(), 20, SampleMode::train, 0);
  const auto a = reconstruct(raw, {0.1, 0.26, 0.1});
  const auto b = reconstruct(raw, {0.4, 0.26, 0.1});
  for (std::size_t k = 0; k < raw.size(); ++k) EXPECT_NEAR((*a.pseudo_e)[k], 4.0 * (*b.pseudo_e)[k], 1e-15);
}

TEST(Reconstruct, Errors) {
  const auto ok = single_point(0.01, -0.001, 0.0006148);
  EXPECT_THROW(reconstruct(ok, {0.0, 0.26, 0.1}), DomainError);
  EXPECT_THROW(reconstruct(ok, {-0.1, 0.26, 0.1}), DomainError);
  auto bad = sample_observations(truth(), oracle::paper_params(), 5, SampleMode::train, 0);
  bad.i_obs[3] = 0.0;
  try {
    reconstruct(bad, {0.2, 0.26, 0.1});
    FAIL() << "expected SingularityError";
  } catch (const SingularityError& e) {
    EXPECT_NE(std::string(e.what()).find("point 3"), std::string::npos);
  }
}

TEST(ObservationsCsv, LayoutWithAndWithoutPseudoData) {
  std::ostringstream raw;
  write_observations_csv(raw, single_point(0.01, -0.001, 0.0006148));
  EXPECT_EQ(raw.str(), "t,I,dI,ddI,S_hat,E_hat,R_hat\n0,0.01,-0.001,0.00061479999999999998,,,\n");
  std::ostringstream full;
  write_observations_csv(full, reconstruct(single_point(0.01, -0.001, 0.0006148), {0.2, 0.26, 0.1}));
  EXPECT_NE(full.str().find("\n0,0.01,-0.001,0.00061479999999999998,0.98"), std::string::npos);
}
