#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "distbandit/plugin.hpp"
#include "distbandit/rng.hpp"
#include "distbandit/simplex.hpp"
#include "distbandit/utility.hpp"

namespace distbandit {

enum class Schedule { Constant, InvSqrt };
enum class ScoreMode { ExactIF, EstimatedIF };

const char* to_string(ScoreMode mode);
const char* to_string(Schedule schedule);

struct AscentConfig {
  int horizon = 2000;
  double gamma = 0.03;
  double eta0 = 0.5;
  Schedule schedule = Schedule::InvSqrt;
  ScoreMode mode = ScoreMode::ExactIF;
  PriorConfig prior;
  // Bias diagnostic cadence in rounds; 0 disables it.
  int bias_every = 0;
  int n_mc = 1000;

  void validate(Eigen::Index arms) const;
};

/// eta0 or eta0 / sqrt(t), t >= 1.
double step_size(int t, const AscentConfig& cfg);

struct StepResult {
  Weights next;
  Eigen::Index arm = 0;
  double reward = 0.0;
  double score = 0.0;
  Eigen::VectorXd ghat;
};

/// One round of influence-function mirror ascent: snapshot from the data
/// before round t, draw (A_t, R_t), multiplicative update, floor
/// projection, then record the draw into `state`.
StepResult step(int t, const Weights& w, const AscentConfig& cfg,
                const UtilityModel& model, PluginState& state, Rng& rng);

/// U* - u, with differences at the round-off level of the utilities
/// themselves reported as exactly 0.
inline double utility_gap(double ustar, double u) {
  const double d = ustar - u;
  const double scale = std::max(std::abs(ustar), std::abs(u));
  return std::abs(d) <= 16 * std::numeric_limits<double>::epsilon() * scale ? 0.0 : d;
}

struct StepRecord {
  int t = 0;
  Weights w;
  Weights wbar;
  double utility = 0.0;      // U(w_t)
  double utility_avg = 0.0;  // U(wbar_t)
  double gap = 0.0;          // U* - U(wbar_t)
  std::optional<double> bias_inf;
  std::optional<double> bias_se_max;
};

struct EpisodeTrace {
  std::vector<StepRecord> steps;
  Weights wbar_final;
  double utility_final = 0.0;
  std::vector<std::size_t> pulls;
  // Data held at the end of the run, for distributional diagnostics.
  std::optional<PluginState> final_state;
  Weights w_final;
};

/// Runs the whole horizon from the uniform start. `bias_rng` feeds the
/// bias Monte Carlo only, so the trajectory does not depend on it.
EpisodeTrace run_episode(const AscentConfig& cfg, const UtilityModel& model,
                         double ustar, Rng& rng, Rng& bias_rng);

EpisodeTrace run_episode(const AscentConfig& cfg, const UtilityModel& model,
                         double ustar, Rng& rng);

}  // namespace distbandit
