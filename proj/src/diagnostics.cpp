#include "distbandit/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace distbandit {

BiasEstimate bias_mc(const Weights& w, std::span<const ArmLaw> arms,
                     const ScoreSnapshot& plugin, const ScoreSnapshot& exact,
                     int n_mc, Rng& rng) {
  if (n_mc < 2) throw std::invalid_argument("bias_mc needs n_mc >= 2");
  const Eigen::Index k_arms = w.size();
  // Welford accumulators per component.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(k_arms);
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(k_arms);
  for (int i = 0; i < n_mc; ++i) {
    const Eigen::Index a = sample_categorical(w, rng);
    const double r = arms[a].sample(rng);
    const double d = plugin(r) - exact(r);
    const Eigen::VectorXd diff = score_gradient(w, a, d);
    const Eigen::VectorXd delta = diff - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta.cwiseProduct(diff - mean);
  }
  BiasEstimate est;
  est.b = mean;
  est.se = (m2 / static_cast<double>(n_mc - 1) / static_cast<double>(n_mc))
               .cwiseSqrt();
  est.n_mc = n_mc;
  return est;
}

BiasEstimate bias_mc(const PluginState& state, const Weights& w,
                     const UtilityModel& model, int n_mc, Rng& rng) {
  const ScoreSnapshot plugin = build_plugin_snapshot(state, w, model);
  const ScoreSnapshot exact = model.exact_snapshot(w);
  return bias_mc(w, model.arms(), plugin, exact, n_mc, rng);
}

RegretSummary regret_accumulate(const EpisodeTrace& trace, double ustar) {
  RegretSummary out;
  out.gap_curve.reserve(trace.steps.size());
  for (const StepRecord& s : trace.steps) {
    out.regret += utility_gap(ustar, s.utility);
    out.gap_curve.push_back(utility_gap(ustar, s.utility_avg));
  }
  return out;
}

}  // namespace distbandit
