#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "distbandit/distributions.hpp"
#include "distbandit/simplex.hpp"

namespace distbandit {

/// Distributional utility: variance, or -W2^2 against a reference law.
struct UtilitySpec {
  enum class Kind { Variance, Wasserstein };

  Kind kind = Kind::Variance;
  std::optional<ArmLaw> reference;

  static UtilitySpec variance() { return {}; }
  static UtilitySpec wasserstein(const ArmLaw& q) {
    return {Kind::Wasserstein, q};
  }

  const ArmLaw& reference_law() const;
  std::string name() const;
};

/// The Kantorovich-potential form -phi + E[phi] is the first variation of
/// -W2^2 / 2; scores for U = -W2^2 are this multiple of it.
inline constexpr double kWassersteinScoreScale = 2.0;

enum class ScoreSource { Exact, Plugin };

/// Influence-function score frozen for one round.
class ScoreSnapshot {
 public:
  ScoreSnapshot(std::function<double(double)> eval, ScoreSource source,
                int round)
      : eval_(std::move(eval)), source_(source), round_(round) {}

  double operator()(double r) const { return eval_(r); }
  ScoreSource source() const { return source_; }
  int round() const { return round_; }

  /// The same score plus a constant.
  ScoreSnapshot shifted(double c) const {
    auto inner = eval_;
    return ScoreSnapshot([inner, c](double r) { return inner(r) + c; }, source_,
                         round_);
  }

 private:
  std::function<double(double)> eval_;
  ScoreSource source_;
  int round_;
};

/// Monotone transport map T = Q^{-1} o F and Kantorovich potential
/// phi(r) = int_0^r (s - T(s)) ds tabulated on a grid. When 0 lies outside
/// the grid the potential is anchored at the left endpoint instead.
struct PotentialGrid {
  QuadratureGrid grid;
  Eigen::VectorXd nodes;
  Eigen::VectorXd phi;
  Eigen::VectorXd transport;

  /// Piecewise-linear interpolation, clamped to the grid.
  double phi_at(double r) const;
  /// int phi dP for a law with cdf values `cdf_at_nodes`, using the exact
  /// cell masses F(x_{i+1}) - F(x_i) against the cell-average of phi.
  double integrate(const Eigen::VectorXd& cdf_at_nodes) const;
  /// Per-column integrate() for a (M+1) x K table of cdfs.
  Eigen::VectorXd integrate_columns(const Eigen::MatrixXd& cdf_table) const;
};

PotentialGrid build_potential(const Eigen::VectorXd& mix_cdf_at_nodes,
                              const ArmLaw& q, const QuadratureGrid& grid);

template <typename Cdf>
PotentialGrid build_potential(const Cdf& mix_cdf, const ArmLaw& q,
                              const QuadratureGrid& grid) {
  Eigen::VectorXd f(grid.size());
  for (int i = 0; i < grid.size(); ++i) f(i) = mix_cdf(grid.node(i));
  return build_potential(f, q, grid);
}

double wasserstein_if(const PotentialGrid& pg, double mix_mean_phi, double r);

double variance_utility(const Weights& w, std::span<const ArmLaw> arms);
double variance_if(double mu_w, double var_w, double r);
Eigen::VectorXd variance_gc(const Weights& w, std::span<const ArmLaw> arms);

/// -W2^2 between the mixture and q, with the mixture quantile obtained by
/// bisection. Slow; UtilityModel::utility is the tabulated equivalent.
double wasserstein_utility(const Weights& w, std::span<const ArmLaw> arms,
                           const ArmLaw& q, int m = 4096);

/// Smallest grid covering every arm and (for Wasserstein) the reference.
QuadratureGrid instance_grid(std::span<const ArmLaw> arms,
                             const UtilitySpec& spec, int intervals = 4096);

/// Centered simplex gradient g_k = E_{P^k}[IF[P^w](R)].
Eigen::VectorXd exact_gc(const Weights& w, std::span<const ArmLaw> arms,
                         const UtilitySpec& spec, const QuadratureGrid& grid);

/// A bandit instance with per-arm quantities tabulated on its grid, giving
/// fast exact utilities, gradients and scores.
class UtilityModel {
 public:
  UtilityModel(std::vector<ArmLaw> arms, UtilitySpec spec,
               int grid_intervals = 4096);

  Eigen::Index num_arms() const { return static_cast<Eigen::Index>(arms_.size()); }
  std::span<const ArmLaw> arms() const { return arms_; }
  const UtilitySpec& spec() const { return spec_; }
  const QuadratureGrid& grid() const { return grid_; }

  double utility(const Weights& w) const;
  Eigen::VectorXd gradient(const Weights& w) const;
  ScoreSnapshot exact_snapshot(const Weights& w, int round = 0) const;

  /// Mixture cdf at the grid nodes.
  Eigen::VectorXd mixture_cdf(const Weights& w) const { return cdf_table_ * w; }
  /// -W2^2 against the reference for an arbitrary cdf tabulated on the grid.
  double wasserstein_utility_from_cdf(const Eigen::VectorXd& cdf) const;

  const Eigen::MatrixXd& cdf_table() const { return cdf_table_; }
  const Eigen::VectorXd& reference_cdf() const { return reference_cdf_; }
  const Eigen::VectorXd& means() const { return means_; }
  const Eigen::VectorXd& second_moments() const { return second_moments_; }

 private:
  std::vector<ArmLaw> arms_;
  UtilitySpec spec_;
  QuadratureGrid grid_;
  Eigen::VectorXd means_, second_moments_;
  Eigen::MatrixXd cdf_table_;
  Eigen::VectorXd reference_cdf_;
  Eigen::VectorXd reference_quantiles_;
};

}  // namespace distbandit
