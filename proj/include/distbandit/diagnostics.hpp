#pragma once

#include <vector>

#include <Eigen/Core>

#include "distbandit/ascent.hpp"
#include "distbandit/plugin.hpp"
#include "distbandit/rng.hpp"
#include "distbandit/utility.hpp"

namespace distbandit {

/// Componentwise Monte Carlo estimate of E[G_plugin - G_exact].
struct BiasEstimate {
  Eigen::VectorXd b;
  Eigen::VectorXd se;
  int n_mc = 0;

  double inf_norm() const { return b.cwiseAbs().maxCoeff(); }
  double max_se() const { return se.maxCoeff(); }
};

/// Paired draws: each (A, R) from (w, true arms) is scored by both
/// snapshots.
BiasEstimate bias_mc(const Weights& w, std::span<const ArmLaw> arms,
                     const ScoreSnapshot& plugin, const ScoreSnapshot& exact,
                     int n_mc, Rng& rng);

/// Bias of the plug-in gradient built from `state` at the pre-update
/// weights `w`.
BiasEstimate bias_mc(const PluginState& state, const Weights& w,
                     const UtilityModel& model, int n_mc, Rng& rng);

struct RegretSummary {
  double regret = 0.0;            // sum_t (U* - U(w_t))
  std::vector<double> gap_curve;  // U* - U(wbar_t), t = 1..T
};

RegretSummary regret_accumulate(const EpisodeTrace& trace, double ustar);

}  // namespace distbandit
