#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "aopinn/seir.hpp"
#include "oracles.hpp"

using namespace aopinn;

namespace {

const Trajectory& paper_trajectory() {
  static const Trajectory traj = simulate(oracle::paper_params(), oracle::paper_init(), 200.0, 0.2);
  return traj;
}

void expect_close(const SeirState& a, const SeirState& b, double tol) {
  EXPECT_NEAR(a.s, b.s, tol);
  EXPECT_NEAR(a.e, b.e, tol);
  EXPECT_NEAR(a.i, b.i, tol);
  EXPECT_NEAR(a.r, b.r, tol);
}

}  // namespace

TEST(Simulate, InitialStateIsExact) {
  const auto& traj = paper_trajectory();
  EXPECT_EQ(traj.times.front(), 0.0);
  EXPECT_EQ(traj.states.front(), oracle::paper_init());
}

TEST(Simulate, GridHas1001PointsAndConserves) {
  const auto& traj = paper_trajectory();
  ASSERT_EQ(traj.size(), 1001u);
  EXPECT_DOUBLE_EQ(traj.t_end(), 200.0);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    EXPECT_LE(std::abs(traj.states[k].total() - 1.0), 1e-9) << "step " << k;
    EXPECT_DOUBLE_EQ(traj.times[k], 0.2 * static_cast<double>(k));
  }
}

TEST(Simulate, MatchesRk4OracleAtEnd) {
  const auto& traj = paper_trajectory();
  const auto ref = oracle::rk4_seir(oracle::paper_params(), oracle::paper_init(), 200.0, 0.01);
  expect_close(traj.states.back(), ref, 1e-6);
}

TEST(Simulate, MonotoneSAndR) {
  const auto& traj = paper_trajectory();
  for (std::size_t k = 1; k < traj.size(); ++k) {
    EXPECT_LE(traj.states[k].s, traj.states[k - 1].s);
    EXPECT_GE(traj.states[k].r, traj.states[k - 1].r);
  }
}

TEST(Simulate, HalvingStepChangesEndStateBelow1e8) {
  const auto coarse = paper_trajectory().states.back();
  const auto fine = simulate(oracle::paper_params(), oracle::paper_init(), 200.0, 0.1).states.back();
  expect_close(coarse, fine, 1e-8);
}

TEST(Simulate, EmbeddedErrorEstimateIsSmall) {
  EXPECT_GT(paper_trajectory().max_local_error, 0.0);
  EXPECT_LT(paper_trajectory().max_local_error, 1e-8);
}

TEST(Simulate, RejectsBadInputs) {
  const auto p = oracle::paper_params();
  const auto x0 = oracle::paper_init();
  EXPECT_THROW(simulate(p, x0, 200.0, 0.0), ValidationError);
  EXPECT_THROW(simulate(p, x0, -1.0, 0.2), ValidationError);
  EXPECT_THROW(simulate(p, SeirState{0.5, 0.0, 0.01, 0.0}, 200.0, 0.2), ValidationError);
  EXPECT_THROW(simulate(EpiParams{0.0, 0.2, 0.1}, x0, 200.0, 0.2), ValidationError);
}

TEST(Simulate, NonMultipleEndShortensLastStep) {
  const auto traj = simulate(oracle::paper_params(), oracle::paper_init(), 1.05, 0.2);
  ASSERT_EQ(traj.size(), 7u);
  EXPECT_EQ(traj.t_end(), 1.05);
  expect_close(traj.states.back(),
               oracle::rk4_seir(oracle::paper_params(), oracle::paper_init(), 1.05, 0.001), 1e-10);
}

TEST(Simulate, BlowUpReportsStep) {
  // An absurd infection rate drives the explicit scheme out of the simplex.
  try {
    simulate(EpiParams{1e6, 0.2, 0.1}, SeirState{0.5, 0.0, 0.5, 0.0}, 1.0, 0.2);
    FAIL() << "expected NumericFailure";
  } catch (const NumericFailure& e) {
    EXPECT_NE(std::string(e.what()).find("step 1"), std::string::npos);
  }
}

TEST(EvalAt, GridPointsAreExact) {
  const auto& traj = paper_trajectory();
  EXPECT_EQ(eval_at(traj, 0.0), oracle::paper_init());
  EXPECT_EQ(eval_at(traj, 100.0), traj.states[500]);
  EXPECT_EQ(eval_at(traj, 200.0), traj.states.back());
}

TEST(EvalAt, OffGridMatchesOracle) {
  const auto& traj = paper_trajectory();
  const auto ref = oracle::rk4_seir(oracle::paper_params(), oracle::paper_init(), 100.1, 0.01);
  expect_close(eval_at(traj, 100.1), ref, 1e-5);
}

TEST(EvalAt, RandomOffGridTimesMatchOracle) {
  const auto& traj = paper_trajectory();
  CounterRng rng(7);
  for (int k = 0; k < 20; ++k) {
    const double t = rng.uniform(0.0, 200.0);
    const auto ref = oracle::rk4_seir(oracle::paper_params(), oracle::paper_init(), t, 0.01);
    expect_close(eval_at(traj, t), ref, 1e-5);
  }
}

TEST(EvalAt, OutsideDomainThrows) {
  EXPECT_THROW(eval_at(paper_trajectory(), -0.1), DomainError);
  EXPECT_THROW(eval_at(paper_trajectory(), 200.01), DomainError);
}

TEST(AnalyticDerivatives, HandSubstitutionAtInitialState) {
  const auto d = analytic_i_derivatives(oracle::paper_params(), oracle::paper_init());
  EXPECT_NEAR(d.i_dot, -0.001, 1e-15);
  EXPECT_NEAR(d.i_ddot, 0.0006148, 1e-15);
}

TEST(AnalyticDerivatives, DiseaseFreeEquilibrium) {
  const auto d = analytic_i_derivatives(EpiParams{0.7, 0.3, 0.05}, SeirState{0.6, 0.0, 0.0, 0.4});
  EXPECT_EQ(d.i_dot, 0.0);
  EXPECT_EQ(d.i_ddot, 0.0);
}

TEST(AnalyticDerivatives, AgreeWithFiniteDifferencesOfDenseOutput) {
  const auto& traj = paper_trajectory();
  const auto p = oracle::paper_params();
  const double h = 1e-2;
  for (double t : {3.3, 41.7, 77.77, 120.05, 180.9}) {
    const auto d = analytic_i_derivatives(p, eval_at(traj, t));
    const double ip = eval_at(traj, t + h).i;
    const double i0 = eval_at(traj, t).i;
    const double im = eval_at(traj, t - h).i;
    EXPECT_NEAR(d.i_dot, (ip - im) / (2 * h), 1e-5) << "t=" << t;
    EXPECT_NEAR(d.i_ddot, (ip - 2 * i0 + im) / (h * h), 1e-3) << "t=" << t;
  }
}

TEST(SampleObservations, TrainGridIsEvenAndIncludesEndpoints) {
  const auto obs = sample_observations(paper_trajectory(), oracle::paper_params(), 50,
                                       SampleMode::train, 0);
  ASSERT_EQ(obs.size(), 50u);
  EXPECT_EQ(obs.times.front(), 0.0);
  EXPECT_EQ(obs.times.back(), 200.0);
  for (std::size_t k = 0; k < 50; ++k) EXPECT_NEAR(obs.times[k], 200.0 * k / 49.0, 1e-12);
  EXPECT_FALSE(obs.pseudo_s.has_value());
  EXPECT_EQ(obs.i_obs.front(), 0.01);
  EXPECT_NEAR(obs.i_dot.front(), -0.001, 1e-15);
}

TEST(SampleObservations, TwoPointTrainGrid) {
  const auto obs = sample_observations(paper_trajectory(), oracle::paper_params(), 2,
                                       SampleMode::train, 0);
  EXPECT_EQ(obs.times, (std::vector<double>{0.0, 200.0}));
}

TEST(SampleObservations, TestModeIsSeededSortedAndInDomain) {
  const auto& traj = paper_trajectory();
  const auto a = sample_observations(traj, oracle::paper_params(), 50, SampleMode::test, 11);
  const auto b = sample_observations(traj, oracle::paper_params(), 50, SampleMode::test, 11);
  const auto c = sample_observations(traj, oracle::paper_params(), 50, SampleMode::test, 12);
  EXPECT_EQ(a.times, b.times);
  EXPECT_EQ(a.i_obs, b.i_obs);
  EXPECT_NE(a.times, c.times);
  EXPECT_TRUE(std::is_sorted(a.times.begin(), a.times.end()));
  for (double t : a.times) {
    EXPECT_GE(t, 0.0);
    EXPECT_LE(t, 200.0);
  }
  EXPECT_THROW(sample_observations(traj, oracle::paper_params(), 1, SampleMode::train, 0),
               ValidationError);
}

TEST(TrajectoryCsv, HeaderAndFullPrecision) {
  std::ostringstream os;
  write_trajectory_csv(os, paper_trajectory());
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,S,E,I,R");
  std::getline(is, line);
  EXPECT_EQ(line, "0,0.98999999999999999,0,0.01,0");
  int rows = 1;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 1001);
}

TEST(CounterRng, DrawsAreAddressable) {
  CounterRng a(42);
  const auto first = a();
  const auto second = a();
  EXPECT_EQ(a.at(0), first);
  EXPECT_EQ(a.at(1), second);
  EXPECT_NE(first, second);
  CounterRng b(42);
  EXPECT_EQ(b(), first);
}
