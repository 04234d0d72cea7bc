#include "distbandit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "distbandit/diagnostics.hpp"

namespace distbandit {
namespace {

std::vector<ArmLaw> scenario1() { return {ArmLaw::beta(2, 2), ArmLaw::beta(4, 2)}; }
std::vector<ArmLaw> scenario2() {
  return {ArmLaw::beta(2, 8), ArmLaw::beta(8, 2), ArmLaw::beta(2, 2), ArmLaw::beta(20, 20)};
}

// On the two-arm segment w = (a, 1 - a) the variance utility is a concave
// quadratic in a:
// U(a) = m2_2 + a (m2_1 - m2_2) - (mu_2 + a (mu_1 - mu_2))^2.
double scenario1_stationary_point() {
  const double mu1 = 0.5, mu2 = 2.0 / 3.0, m21 = 0.3, m22 = 20.0 / 42.0;
  const double d = mu1 - mu2;
  return ((m21 - m22) - 2 * mu2 * d) / (2 * d * d);
}

TEST(KktCertificate, Cases) {
  const Weights w = Eigen::Vector3d(0.5, 0.47, 0.03);
  EXPECT_DOUBLE_EQ(kkt_certificate(Eigen::Vector3d(1.0, 1.0, 0.2), w, 0.03), 0.0);
  EXPECT_DOUBLE_EQ(kkt_certificate(Eigen::Vector3d(1.0, 0.9, 0.2), w, 0.03), 0.1);
  // A floored coordinate with a larger gradient wants to grow.
  EXPECT_DOUBLE_EQ(kkt_certificate(Eigen::Vector3d(1.0, 1.0, 1.5), w, 0.03), 0.5);
}

TEST(SolveOffline, IdenticalArmsGiveUniform) {
  const UtilityModel model(std::vector<ArmLaw>(4, ArmLaw::beta(2, 3)), UtilitySpec::variance());
  const OracleResult r = solve_offline(model, 0.03);
  EXPECT_LE((r.wstar - uniform_weights(4)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(r.certificate, 0.0, 1e-14);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(active_support(r.wstar, 0.03), 4);
}

TEST(SolveOffline, ScenarioOneVariance) {
  const double a = scenario1_stationary_point();
  ASSERT_NEAR(a, 0.8286, 1e-4);
  const auto arms = scenario1();
  const double ua = variance_utility(Eigen::Vector2d(a, 1 - a), arms);
  ASSERT_NEAR(ua, 0.050816, 1e-6);

  const UtilityModel model(arms, UtilitySpec::variance());
  const OracleResult r = solve_offline(model, 0.03);
  EXPECT_NEAR(r.wstar(0), a, 1e-6);
  EXPECT_NEAR(r.wstar(1), 1 - a, 1e-6);
  EXPECT_NEAR(r.ustar, ua, 1e-10);
  EXPECT_LE(r.certificate, 1e-5);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(active_support(r.wstar, 0.03), 2);
}

TEST(SolveOffline, AgreesWithDenseSegmentGrid) {
  const UtilityModel model(scenario1(), UtilitySpec::wasserstein(ArmLaw::uniform(0, 1)));
  const OracleResult r = solve_offline(model, 0.03);
  double best = -INFINITY;
  for (int i = 0; i <= 9400; ++i) {
    const double a = 0.03 + i * 1e-4;
    best = std::max(best, model.utility(Eigen::Vector2d(a, 1 - a)));
  }
  EXPECT_GE(r.ustar, best - 1e-9);
  EXPECT_LE(r.ustar - best, 1e-5);
}

TEST(SolveOffline, AllArmsEqualReference) {
  const ArmLaw q = ArmLaw::uniform(0, 1);
  const UtilityModel model(std::vector<ArmLaw>(3, q), UtilitySpec::wasserstein(q));
  const OracleResult r = solve_offline(model, 0.03);
  EXPECT_NEAR(r.ustar, 0.0, 1e-12);
  EXPECT_NEAR(model.utility(Eigen::Vector3d(0.9, 0.05, 0.05)), 0.0, 1e-12);
}

TEST(SolveOffline, KktHoldsOnLargerInstances) {
  for (const UtilitySpec& spec :
       {UtilitySpec::variance(), UtilitySpec::wasserstein(ArmLaw::uniform(0, 1))}) {
    const UtilityModel model(scenario2(), spec);
    const OracleResult r = solve_offline(model, 0.03);
    EXPECT_TRUE(in_truncated_simplex(r.wstar, 0.03));
    EXPECT_LE(kkt_certificate(model.gradient(r.wstar), r.wstar, 0.03), 1e-5) << spec.name();
    EXPECT_NEAR(r.ustar, model.utility(r.wstar), 1e-15);
  }
}

TEST(SolveOffline, SeedStable) {
  const UtilityModel model(scenario2(), UtilitySpec::wasserstein(ArmLaw::uniform(0, 1)));
  OracleOptions a, b;
  a.seed = 1;
  b.seed = 99;
  EXPECT_NEAR(solve_offline(model, 0.03, a).ustar, solve_offline(model, 0.03, b).ustar, 1e-6);
}

TEST(ActiveSupport, Examples) {
  EXPECT_EQ(active_support(uniform_weights(4), 0.03), 4);
  Eigen::VectorXd corner = Eigen::VectorXd::Constant(5, 0.03);
  corner(2) = 1 - 4 * 0.03;
  EXPECT_EQ(active_support(corner, 0.03), 1);
}

TEST(BiasMc, IdenticalSnapshotsGiveZero) {
  const auto arms = scenario1();
  const UtilityModel model(arms, UtilitySpec::variance());
  const Weights w = Eigen::Vector2d(0.3, 0.7);
  const ScoreSnapshot snap = model.exact_snapshot(w);
  Rng rng(51);
  const BiasEstimate est = bias_mc(w, arms, snap, snap, 1000, rng);
  EXPECT_EQ(est.n_mc, 1000);
  EXPECT_EQ(est.inf_norm(), 0.0);
  EXPECT_LE(est.inf_norm(), 3 * est.max_se());
}

TEST(BiasMc, ConstantShiftHasZeroMean) {
  const std::vector<ArmLaw> arms = scenario2();
  const UtilityModel model(arms, UtilitySpec::variance());
  const Weights w = Eigen::Vector4d(0.1, 0.2, 0.3, 0.4);
  const ScoreSnapshot exact = model.exact_snapshot(w);
  Rng rng(52);
  int within = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const BiasEstimate est = bias_mc(w, arms, exact.shifted(0.7), exact, 1000, rng);
    bool ok = true;
    for (int k = 0; k < 4; ++k) ok = ok && std::abs(est.b(k)) <= 3 * est.se(k);
    within += ok;
  }
  // Four components at 3 SE each: about 1% failure per component.
  EXPECT_GE(within, 90);
}

TEST(BiasMc, RejectsTooFewDraws) {
  const auto arms = scenario1();
  const ScoreSnapshot zero([](double) { return 0.0; }, ScoreSource::Exact, 0);
  Rng rng(53);
  EXPECT_THROW(bias_mc(Eigen::Vector2d(0.5, 0.5), arms, zero, zero, 1, rng), std::invalid_argument);
}

TEST(BiasMc, PluginBiasDecaysAlongEpisodes) {
  const UtilityModel model(scenario1(), UtilitySpec::variance());
  AscentConfig cfg;
  cfg.horizon = 1000;
  cfg.mode = ScoreMode::EstimatedIF;
  cfg.bias_every = 20;
  cfg.n_mc = 1000;
  double early = 0, late = 0;
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(3000 + seed), bias_rng(4000 + seed);
    const EpisodeTrace trace = run_episode(cfg, model, 0.0, rng, bias_rng);
    early += *trace.steps[19].bias_inf;
    late += *trace.steps[999].bias_inf;
  }
  EXPECT_LT(late, early);
}

TEST(RegretAccumulate, ConstantOptimumHasNoRegret) {
  const UtilityModel model(scenario1(), UtilitySpec::variance());
  const OracleResult r = solve_offline(model, 0.03);
  EpisodeTrace trace;
  for (int t = 1; t <= 50; ++t) {
    StepRecord s;
    s.t = t;
    s.w = s.wbar = r.wstar;
    s.utility = s.utility_avg = model.utility(r.wstar);
    trace.steps.push_back(s);
  }
  const RegretSummary sum = regret_accumulate(trace, r.ustar);
  EXPECT_NEAR(sum.regret, 0.0, 1e-13);
  ASSERT_EQ(sum.gap_curve.size(), 50u);
  for (double g : sum.gap_curve) EXPECT_NEAR(g, 0.0, 1e-15);
}

TEST(RegretAccumulate, IdenticalArmsNoRegret) {
  const UtilityModel model(std::vector<ArmLaw>(2, ArmLaw::beta(2, 2)), UtilitySpec::variance());
  AscentConfig cfg;
  cfg.horizon = 100;
  Rng rng(54);
  const double ustar = solve_offline(model, 0.03).ustar;
  EXPECT_NEAR(regret_accumulate(run_episode(cfg, model, ustar, rng), ustar).regret, 0.0, 1e-12);
}

TEST(RegretAccumulate, SumsPerRoundGaps) {
  EpisodeTrace trace;
  for (int t = 1; t <= 3; ++t) {
    StepRecord s;
    s.t = t;
    s.utility = 0.1 * t;
    s.utility_avg = 0.05 * t;
    trace.steps.push_back(s);
  }
  const RegretSummary sum = regret_accumulate(trace, 1.0);
  EXPECT_NEAR(sum.regret, 3.0 - 0.6, 1e-15);
  EXPECT_NEAR(sum.gap_curve[2], 0.85, 1e-15);
}

TEST(RegretAccumulate, AverageRegretShrinksWithHorizon) {
  const UtilityModel model(scenario1(), UtilitySpec::variance());
  const double ustar = solve_offline(model, 0.03).ustar;
  AscentConfig cfg;
  cfg.horizon = 2000;
  double at200 = 0, at2000 = 0;
  for (int seed = 0; seed < 50; ++seed) {
    Rng rng(5000 + seed);
    const EpisodeTrace trace = run_episode(cfg, model, ustar, rng);
    double reg = 0;
    for (const StepRecord& s : trace.steps) {
      reg += ustar - s.utility;
      if (s.t == 200) at200 += reg / 200;
    }
    at2000 += regret_accumulate(trace, ustar).regret / 2000;
  }
  EXPECT_LT(at2000, at200);
}

}  // namespace
}  // namespace distbandit
