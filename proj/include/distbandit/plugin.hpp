#pragma once

#include <vector>

#include <Eigen/Core>

#include "distbandit/distributions.hpp"
#include "distbandit/simplex.hpp"
#include "distbandit/utility.hpp"

namespace distbandit {

/// Count prior of size alpha0 with prior mean m0 and second moment s0.
struct PriorConfig {
  double alpha0 = 1.0;
  double m0 = 0.5;
  double s0 = 1.0 / 3.0;

  /// alpha0 with the moments of Uniform(lo, hi).
  static PriorConfig uninformative(double lo, double hi, double alpha0 = 1.0);
  void validate() const;
};

struct ShrunkMoments {
  double mean;
  double second_moment;
};

/// (S + alpha0 m0) / (N + alpha0) and (S2 + alpha0 s0) / (N + alpha0).
ShrunkMoments shrunk_moments(const EmpiricalArm& arm, const PriorConfig& prior);

/// (N F_emp(x) + alpha0 Q(x)) / (N + alpha0).
double regularized_cdf(const EmpiricalArm& arm, const ArmLaw& q, double alpha0,
                       double x);

/// Rewards observed so far in one episode, one record per arm.
class PluginState {
 public:
  PluginState(Eigen::Index arms, PriorConfig prior);

  void record(Eigen::Index arm, double reward);

  Eigen::Index num_arms() const { return static_cast<Eigen::Index>(arms_.size()); }
  const EmpiricalArm& arm(Eigen::Index k) const { return arms_[k]; }
  const PriorConfig& prior() const { return prior_; }
  std::size_t total_pulls() const { return total_; }

  /// Regularized cdf of arm k at every node of `grid`; `reference_cdf` is
  /// the regularizing law tabulated on the same grid.
  Eigen::VectorXd regularized_cdf_table(Eigen::Index k, const QuadratureGrid& grid,
                                        const Eigen::VectorXd& reference_cdf) const;

 private:
  std::vector<EmpiricalArm> arms_;
  PriorConfig prior_;
  std::size_t total_ = 0;
};

/// Influence function of the utility at the regularized plug-in mixture
/// sum_k w_k F^k built from `state`.
ScoreSnapshot build_plugin_snapshot(const PluginState& state, const Weights& w,
                                    const UtilityModel& model, int round = 0);

/// G_k = (1{a = k} / w_k - 1) * score.
Eigen::VectorXd score_gradient(const Weights& w, Eigen::Index arm, double score);

inline Eigen::VectorXd score_gradient(const Weights& w, Eigen::Index arm,
                                      double reward, const ScoreSnapshot& snap) {
  return score_gradient(w, arm, snap(reward));
}

}  // namespace distbandit
