#include "distbandit/plugin.hpp"

#include <algorithm>
#include <cassert>
#include <memory>
#include <stdexcept>

namespace distbandit {

PriorConfig PriorConfig::uninformative(double lo, double hi, double alpha0) {
  const ArmLaw u = ArmLaw::uniform(lo, hi);
  const Moments m = u.moments();
  return {alpha0, m.mean, m.second_moment};
}

void PriorConfig::validate() const {
  if (!(alpha0 >= 0.0)) throw std::invalid_argument("alpha0 must be >= 0");
  if (s0 < m0 * m0) throw std::invalid_argument("prior requires s0 >= m0^2");
}

ShrunkMoments shrunk_moments(const EmpiricalArm& arm, const PriorConfig& prior) {
  const double n = static_cast<double>(arm.count());
  const double denom = n + prior.alpha0;
  if (!(denom > 0.0))
    throw std::invalid_argument("shrunk moments undefined with N = 0 and alpha0 = 0");
  return {(arm.sum() + prior.alpha0 * prior.m0) / denom,
          (arm.sum_sq() + prior.alpha0 * prior.s0) / denom};
}

double regularized_cdf(const EmpiricalArm& arm, const ArmLaw& q, double alpha0,
                       double x) {
  const double n = static_cast<double>(arm.count());
  const double denom = n + alpha0;
  if (!(denom > 0.0))
    throw std::invalid_argument("regularized cdf undefined with N = 0 and alpha0 = 0");
  const double emp = arm.count() > 0 ? arm.cdf(x) : 0.0;
  return (n * emp + alpha0 * q.cdf(x)) / denom;
}

PluginState::PluginState(Eigen::Index arms, PriorConfig prior)
    : arms_(static_cast<std::size_t>(arms)), prior_(prior) {
  prior_.validate();
}

void PluginState::record(Eigen::Index arm, double reward) {
  if (arm < 0 || arm >= num_arms()) throw std::out_of_range("arm index");
  arms_[arm].add(reward);
  ++total_;
}

Eigen::VectorXd PluginState::regularized_cdf_table(
    Eigen::Index k, const QuadratureGrid& grid,
    const Eigen::VectorXd& reference_cdf) const {
  const EmpiricalArm& a = arms_[k];
  const double n = static_cast<double>(a.count());
  const double denom = n + prior_.alpha0;
  if (!(denom > 0.0))
    throw std::invalid_argument("regularized cdf undefined with N = 0 and alpha0 = 0");
  Eigen::VectorXd out = (prior_.alpha0 / denom) * reference_cdf;
  const auto s = a.samples();
  std::size_t j = 0;
  for (int i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    while (j < s.size() && s[j] <= x) ++j;
    out(i) += static_cast<double>(j) / denom;
  }
  return out;
}

ScoreSnapshot build_plugin_snapshot(const PluginState& state, const Weights& w,
                                    const UtilityModel& model, int round) {
  const Eigen::Index k_arms = state.num_arms();
  if (w.size() != k_arms || model.num_arms() != k_arms)
    throw std::invalid_argument("plug-in snapshot: arm count mismatch");
  const PriorConfig& prior = state.prior();

  if (model.spec().kind == UtilitySpec::Kind::Variance) {
    double mean = 0.0, m2 = 0.0;
    for (Eigen::Index k = 0; k < k_arms; ++k) {
      const ShrunkMoments sm = shrunk_moments(state.arm(k), prior);
      mean += w(k) * sm.mean;
      m2 += w(k) * sm.second_moment;
    }
    const double var = m2 - mean * mean;
    // Convex combinations of valid moment pairs cannot have negative variance.
    assert(var >= -1e-12);
    return ScoreSnapshot(
        [mean, var](double r) { return variance_if(mean, var, r); },
        ScoreSource::Plugin, round);
  }

  const QuadratureGrid& grid = model.grid();
  const Eigen::VectorXd& q_cdf = model.reference_cdf();
  Eigen::VectorXd mix = Eigen::VectorXd::Zero(grid.size());
  for (Eigen::Index k = 0; k < k_arms; ++k)
    mix += w(k) * state.regularized_cdf_table(k, grid, q_cdf);

  auto pg = std::make_shared<const PotentialGrid>(
      build_potential(mix, model.spec().reference_law(), grid));

  // E[phi] under the same regularized mixture: sample average for the
  // empirical part, cell-mass quadrature for the reference part.
  const double phi_q = pg->integrate(q_cdf);
  double mean_phi = 0.0;
  for (Eigen::Index k = 0; k < k_arms; ++k) {
    const EmpiricalArm& a = state.arm(k);
    double phi_sum = 0.0;
    for (double r : a.samples()) phi_sum += pg->phi_at(r);
    const double denom = static_cast<double>(a.count()) + prior.alpha0;
    mean_phi += w(k) * (phi_sum + prior.alpha0 * phi_q) / denom;
  }
  return ScoreSnapshot(
      [pg, mean_phi](double r) {
        return kWassersteinScoreScale * wasserstein_if(*pg, mean_phi, r);
      },
      ScoreSource::Plugin, round);
}

Eigen::VectorXd score_gradient(const Weights& w, Eigen::Index arm, double score) {
  if (arm < 0 || arm >= w.size()) throw std::out_of_range("arm index");
  Eigen::VectorXd g = Eigen::VectorXd::Constant(w.size(), -score);
  g(arm) += score / w(arm);
  return g;
}

}  // namespace distbandit
