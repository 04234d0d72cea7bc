#include "distbandit/ascent.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "distbandit/diagnostics.hpp"
#include "distbandit/oracle.hpp"

namespace distbandit {
namespace {

std::vector<ArmLaw> scenario1() { return {ArmLaw::beta(2, 2), ArmLaw::beta(4, 2)}; }

AscentConfig exact_config(int horizon = 2000) {
  AscentConfig cfg;
  cfg.horizon = horizon;
  cfg.mode = ScoreMode::ExactIF;
  return cfg;
}

TEST(StepSize, Schedules) {
  AscentConfig cfg;
  cfg.eta0 = 0.5;
  cfg.schedule = Schedule::InvSqrt;
  EXPECT_DOUBLE_EQ(step_size(1, cfg), 0.5);
  EXPECT_DOUBLE_EQ(step_size(4, cfg), 0.25);
  cfg.schedule = Schedule::Constant;
  EXPECT_DOUBLE_EQ(step_size(1, cfg), 0.5);
  EXPECT_DOUBLE_EQ(step_size(977, cfg), 0.5);
  EXPECT_THROW(step_size(0, cfg), std::invalid_argument);
}

TEST(UtilityGap, SnapsRoundOffToZero) {
  EXPECT_EQ(utility_gap(0.05, 0.05 + 1e-18), 0.0);
  EXPECT_EQ(utility_gap(-0.3, -0.3 - 2e-17), 0.0);
  EXPECT_DOUBLE_EQ(utility_gap(0.05, 0.04), 0.01);
  EXPECT_LT(utility_gap(0.05, 0.06), 0.0);
}

TEST(AscentConfig, Validation) {
  AscentConfig cfg;
  EXPECT_NO_THROW(cfg.validate(2));
  EXPECT_THROW(cfg.validate(1), std::invalid_argument);
  cfg.gamma = 0.25;
  EXPECT_THROW(cfg.validate(4), std::invalid_argument);
  cfg = AscentConfig{};
  cfg.horizon = 0;
  EXPECT_THROW(cfg.validate(2), std::invalid_argument);
  cfg = AscentConfig{};
  cfg.eta0 = 0;
  EXPECT_THROW(cfg.validate(2), std::invalid_argument);
}

TEST(Step, HandComposedExample) {
  // Score 2 on arm 0 at the uniform point: G = (2, -2). With eta = ln 2 / 2
  // the exponents are (ln 2, -ln 2), so the odds become 4 : 1.
  const Weights w = Eigen::Vector2d(0.5, 0.5);
  const Eigen::VectorXd g = score_gradient(w, 0, 2.0);
  const FloorParams fp(0.03, 2);
  const Weights next = kl_project_floor(mw_update(w, g, std::log(2.0) / 2), fp);
  EXPECT_NEAR(next(0), 0.8, 1e-15);
  EXPECT_NEAR(next(1), 0.2, 1e-15);
  // eta = ln 2 / 4 gives odds 2 : 1.
  const Weights half = kl_project_floor(mw_update(w, g, std::log(2.0) / 4), fp);
  EXPECT_NEAR(half(0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(half(1), 1.0 / 3.0, 1e-15);
}

TEST(Step, ReplaysAsComposition) {
  const UtilityModel model(scenario1(), UtilitySpec::variance());
  AscentConfig cfg = exact_config();
  const Weights w = Eigen::Vector2d(0.6, 0.4);
  PluginState state(2, cfg.prior);
  Rng rng(41);
  Rng replay = rng;
  const StepResult res = step(3, w, cfg, model, state, rng);

  const Eigen::Index a = sample_categorical(w, replay);
  const double r = model.arms()[a].sample(replay);
  EXPECT_EQ(res.arm, a);
  EXPECT_EQ(res.reward, r);
  const double score = model.exact_snapshot(w)(r);
  EXPECT_EQ(res.score, score);
  const Weights expect = kl_project_floor(
      mw_update(w, score_gradient(w, a, score), cfg.eta0 / std::sqrt(3.0)), FloorParams(0.03, 2));
  EXPECT_LE((res.next - expect).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(state.total_pulls(), 1u);
  EXPECT_EQ(state.arm(a).count(), 1u);
}

TEST(Step, ZeroScoreIsFixedPoint) {
  const ArmLaw q = ArmLaw::uniform(0, 1);
  const UtilityModel model(std::vector<ArmLaw>(3, q), UtilitySpec::wasserstein(q));
  const Weights w = Eigen::Vector3d(0.2, 0.3, 0.5);
  Rng rng(42);
  for (ScoreMode mode : {ScoreMode::ExactIF, ScoreMode::EstimatedIF}) {
    AscentConfig cfg;
    cfg.mode = mode;
    PluginState state(3, PriorConfig{});
    const StepResult res = step(1, w, cfg, model, state, rng);
    EXPECT_LE((res.next - w).cwiseAbs().maxCoeff(), 1e-12) << to_string(mode);
  }
}

// The round-t snapshot must ignore (A_t, R_t): rebuild it from the state as
// it was before the round and compare.
TEST(Step, SnapshotExcludesCurrentDraw) {
  const auto arms = scenario1();
  const UtilityModel model(arms, UtilitySpec::wasserstein(ArmLaw::uniform(0, 1)));
  AscentConfig cfg;
  cfg.mode = ScoreMode::EstimatedIF;
  PluginState state(2, cfg.prior);
  Rng rng(43);
  Weights w = uniform_weights(2);
  for (int t = 1; t <= 30; ++t) {
    const PluginState before = state;
    Rng replay = rng;
    const StepResult res = step(t, w, cfg, model, state, rng);

    const Eigen::Index a = sample_categorical(w, replay);
    const double r = arms[a].sample(replay);
    const double withheld = build_plugin_snapshot(before, w, model)(r);
    EXPECT_EQ(res.score, withheld) << "round " << t;

    PluginState leaked = before;
    leaked.record(a, r);
    EXPECT_NE(res.score, build_plugin_snapshot(leaked, w, model)(r)) << "round " << t;
    w = res.next;
  }
}

TEST(RunEpisode, FeasibleIteratesAndRunningAverage) {
  const UtilityModel model(scenario1(), UtilitySpec::variance());
  Rng rng(44);
  const EpisodeTrace trace = run_episode(exact_config(1000), model, 0.0508163265, rng);
  ASSERT_EQ(trace.steps.size(), 1000u);
  Weights sum = Weights::Zero(2);
  for (const StepRecord& s : trace.steps) {
    EXPECT_GE(s.w.minCoeff(), 0.03 - 1e-12);
    EXPECT_NEAR(s.w.sum(), 1.0, 1e-12);
    sum += s.w;
    EXPECT_LE((s.wbar - sum / s.t).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_EQ(s.gap, utility_gap(0.0508163265, s.utility_avg));
  }
  EXPECT_EQ(trace.steps.front().w, uniform_weights(2));
  EXPECT_EQ(trace.pulls[0] + trace.pulls[1], 1000u);
  EXPECT_EQ(trace.final_state->total_pulls(), 1000u);
  EXPECT_GE(trace.w_final.minCoeff(), 0.03 - 1e-12);
}

TEST(RunEpisode, Deterministic) {
  const UtilityModel model(scenario1(), UtilitySpec::wasserstein(ArmLaw::uniform(0, 1)));
  AscentConfig cfg;
  cfg.horizon = 300;
  cfg.mode = ScoreMode::EstimatedIF;
  cfg.bias_every = 50;
  cfg.n_mc = 50;
  Rng a(45), b(45), ba(46), bb(46);
  const EpisodeTrace x = run_episode(cfg, model, 0.0, a, ba);
  const EpisodeTrace y = run_episode(cfg, model, 0.0, b, bb);
  ASSERT_EQ(x.steps.size(), y.steps.size());
  for (std::size_t i = 0; i < x.steps.size(); ++i) {
    EXPECT_EQ(x.steps[i].w, y.steps[i].w);
    EXPECT_EQ(x.steps[i].utility, y.steps[i].utility);
    EXPECT_EQ(x.steps[i].bias_inf, y.steps[i].bias_inf);
  }
  EXPECT_EQ(x.pulls, y.pulls);
}

TEST(RunEpisode, BiasStreamDoesNotMoveTrajectory) {
  const UtilityModel model(scenario1(), UtilitySpec::variance());
  AscentConfig cfg;
  cfg.horizon = 200;
  cfg.mode = ScoreMode::EstimatedIF;
  Rng a(47), b(47), ba(1), bb(2);
  cfg.bias_every = 10;
  cfg.n_mc = 20;
  const EpisodeTrace x = run_episode(cfg, model, 0.0, a, ba);
  cfg.bias_every = 0;
  const EpisodeTrace y = run_episode(cfg, model, 0.0, b, bb);
  for (std::size_t i = 0; i < x.steps.size(); ++i) EXPECT_EQ(x.steps[i].w, y.steps[i].w);
  EXPECT_TRUE(x.steps[9].bias_inf.has_value());
  EXPECT_FALSE(x.steps[8].bias_inf.has_value());
  EXPECT_FALSE(y.steps[9].bias_inf.has_value());
}

TEST(RunEpisode, IdenticalArmsHaveZeroGap) {
  const std::vector<ArmLaw> arms(3, ArmLaw::beta(2, 5));
  for (const UtilitySpec& spec :
       {UtilitySpec::variance(), UtilitySpec::wasserstein(ArmLaw::uniform(0, 1))}) {
    const UtilityModel model(arms, spec);
    const double ustar = model.utility(uniform_weights(3));
    for (ScoreMode mode : {ScoreMode::ExactIF, ScoreMode::EstimatedIF}) {
      AscentConfig cfg;
      cfg.horizon = 200;
      cfg.mode = mode;
      Rng rng(48);
      const EpisodeTrace trace = run_episode(cfg, model, ustar, rng);
      for (const StepRecord& s : trace.steps) EXPECT_NEAR(s.gap, 0.0, 1e-12);
    }
  }
}

// Equal means make the variance utility linear in w; ascent should keep
// moving mass to the widest arm.
TEST(RunEpisode, LinearUtilityFavoursLargestVariance) {
  const std::vector<ArmLaw> arms = {ArmLaw::beta(5, 5), ArmLaw::beta(2, 2), ArmLaw::uniform(0, 1)};
  const UtilityModel model(arms, UtilitySpec::variance());
  const AscentConfig cfg = exact_config(2000);
  double at100 = 0, at500 = 0, at2000 = 0;
  for (int seed = 0; seed < 50; ++seed) {
    Rng rng(1000 + seed);
    const EpisodeTrace trace = run_episode(cfg, model, 0.0, rng);
    at100 += trace.steps[99].wbar(2);
    at500 += trace.steps[499].wbar(2);
    at2000 += trace.steps[1999].wbar(2);
  }
  EXPECT_LE(at100, at500);
  EXPECT_LE(at500, at2000);
}

TEST(RunEpisode, AveragedGapDecreasesOnScenarioOne) {
  const UtilityModel model(scenario1(), UtilitySpec::variance());
  const double ustar = solve_offline(model, 0.03).ustar;
  const AscentConfig cfg = exact_config(2000);
  double at100 = 0, at2000 = 0;
  for (int seed = 0; seed < 50; ++seed) {
    Rng rng(2000 + seed);
    const EpisodeTrace trace = run_episode(cfg, model, ustar, rng);
    at100 += trace.steps[99].gap;
    at2000 += trace.steps[1999].gap;
  }
  EXPECT_LT(at2000, at100);
}

}  // namespace
}  // namespace distbandit
