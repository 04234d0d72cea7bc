#include "distbandit/utility.hpp"

#include <algorithm>
#include <cassert>

namespace distbandit {

const ArmLaw& UtilitySpec::reference_law() const {
  if (!reference) throw std::logic_error("utility has no reference law");
  return *reference;
}

std::string UtilitySpec::name() const {
  return kind == Kind::Variance ? "variance" : "wasserstein";
}

double PotentialGrid::phi_at(double r) const {
  const double h = grid.step();
  const double pos = std::clamp((r - grid.lo) / h, 0.0,
                                static_cast<double>(grid.intervals));
  const int i = std::min(static_cast<int>(pos), grid.intervals - 1);
  const double t = pos - i;
  return (1.0 - t) * phi(i) + t * phi(i + 1);
}

double PotentialGrid::integrate(const Eigen::VectorXd& cdf_at_nodes) const {
  const int m = grid.intervals;
  const auto mass = cdf_at_nodes.tail(m) - cdf_at_nodes.head(m);
  const auto mid = 0.5 * (phi.tail(m) + phi.head(m));
  return mass.dot(mid);
}

Eigen::VectorXd PotentialGrid::integrate_columns(
    const Eigen::MatrixXd& cdf_table) const {
  const int m = grid.intervals;
  const Eigen::VectorXd mid = 0.5 * (phi.tail(m) + phi.head(m));
  return (cdf_table.bottomRows(m) - cdf_table.topRows(m)).transpose() * mid;
}

PotentialGrid build_potential(const Eigen::VectorXd& mix_cdf_at_nodes,
                              const ArmLaw& q, const QuadratureGrid& grid) {
  if (mix_cdf_at_nodes.size() != grid.size())
    throw std::invalid_argument("build_potential: cdf/grid size mismatch");
  PotentialGrid pg;
  pg.grid = grid;
  pg.nodes = grid.nodes();
  const int n = grid.size();
  pg.transport.resize(n);
  for (int i = 0; i < n; ++i)
    pg.transport(i) = q.quantile(std::clamp(mix_cdf_at_nodes(i), 0.0, 1.0));
  // Keep T monotone against round-off in the tabulated cdf.
  for (int i = 1; i < n; ++i)
    pg.transport(i) = std::max(pg.transport(i), pg.transport(i - 1));

  const Eigen::VectorXd slope = pg.nodes - pg.transport;
  const double h = grid.step();
  pg.phi.resize(n);
  pg.phi(0) = 0.0;
  for (int i = 1; i < n; ++i)
    pg.phi(i) = pg.phi(i - 1) + 0.5 * h * (slope(i - 1) + slope(i));
  if (grid.lo <= 0.0 && 0.0 <= grid.hi) pg.phi.array() -= pg.phi_at(0.0);
  return pg;
}

double wasserstein_if(const PotentialGrid& pg, double mix_mean_phi, double r) {
  return -pg.phi_at(r) + mix_mean_phi;
}

namespace {

std::pair<Eigen::VectorXd, Eigen::VectorXd> moment_vectors(
    std::span<const ArmLaw> arms) {
  Eigen::VectorXd mu(arms.size()), m2(arms.size());
  for (std::size_t k = 0; k < arms.size(); ++k) {
    const Moments m = arms[k].moments();
    mu(k) = m.mean;
    m2(k) = m.second_moment;
  }
  return {mu, m2};
}

void check_weights(const Weights& w, std::size_t arms) {
  if (static_cast<std::size_t>(w.size()) != arms)
    throw std::invalid_argument("weights and arms differ in length");
}

}  // namespace

double variance_utility(const Weights& w, std::span<const ArmLaw> arms) {
  check_weights(w, arms.size());
  const auto [mu, m2] = moment_vectors(arms);
  const double mean = mu.dot(w);
  return m2.dot(w) - mean * mean;
}

double variance_if(double mu_w, double var_w, double r) {
  const double d = r - mu_w;
  return d * d - var_w;
}

namespace {

Eigen::VectorXd variance_gradient(const Eigen::VectorXd& mu,
                                  const Eigen::VectorXd& m2, const Weights& w) {
  const double mean = mu.dot(w);
  const double var = m2.dot(w) - mean * mean;
  return (m2.array() - 2.0 * mean * mu.array() + mean * mean - var).matrix();
}

}  // namespace

Eigen::VectorXd variance_gc(const Weights& w, std::span<const ArmLaw> arms) {
  check_weights(w, arms.size());
  const auto [mu, m2] = moment_vectors(arms);
  return variance_gradient(mu, m2, w);
}

double wasserstein_utility(const Weights& w, std::span<const ArmLaw> arms,
                           const ArmLaw& q, int m) {
  check_weights(w, arms.size());
  const MixtureView mix(arms, w);
  const double d = w2_distance([&](double u) { return mix.quantile(u); },
                               [&](double u) { return q.quantile(u); }, m);
  return -d * d;
}

QuadratureGrid instance_grid(std::span<const ArmLaw> arms,
                             const UtilitySpec& spec, int intervals) {
  auto [lo, hi] = common_support(arms);
  if (spec.kind == UtilitySpec::Kind::Wasserstein) {
    lo = std::min(lo, spec.reference_law().lo());
    hi = std::max(hi, spec.reference_law().hi());
  }
  return QuadratureGrid(lo, hi, intervals);
}

Eigen::VectorXd exact_gc(const Weights& w, std::span<const ArmLaw> arms,
                         const UtilitySpec& spec, const QuadratureGrid& grid) {
  if (spec.kind == UtilitySpec::Kind::Variance) return variance_gc(w, arms);
  check_weights(w, arms.size());
  const ArmLaw& q = spec.reference_law();
  if (!grid.covers(q.lo(), q.hi()))
    throw std::invalid_argument("exact_gc: grid does not cover the reference");
  Eigen::MatrixXd table(grid.size(), arms.size());
  for (std::size_t k = 0; k < arms.size(); ++k) {
    if (!grid.covers(arms[k].lo(), arms[k].hi()))
      throw std::invalid_argument("exact_gc: grid does not cover an arm");
    for (int i = 0; i < grid.size(); ++i) table(i, k) = arms[k].cdf(grid.node(i));
  }
  const PotentialGrid pg = build_potential(Eigen::VectorXd(table * w), q, grid);
  const Eigen::VectorXd per_arm = pg.integrate_columns(table);
  const double mean_phi = w.dot(per_arm);
  return kWassersteinScoreScale *
         (Eigen::VectorXd::Constant(w.size(), mean_phi) - per_arm);
}

UtilityModel::UtilityModel(std::vector<ArmLaw> arms, UtilitySpec spec,
                           int grid_intervals)
    : arms_(std::move(arms)),
      spec_(std::move(spec)),
      grid_(instance_grid(arms_, spec_, grid_intervals)) {
  if (arms_.empty()) throw std::invalid_argument("model needs at least one arm");
  std::tie(means_, second_moments_) = moment_vectors(arms_);
  if (spec_.kind != UtilitySpec::Kind::Wasserstein) return;

  const int n = grid_.size();
  const int m = grid_.intervals;
  cdf_table_.resize(n, num_arms());
  for (Eigen::Index k = 0; k < num_arms(); ++k)
    for (int i = 0; i < n; ++i) cdf_table_(i, k) = arms_[k].cdf(grid_.node(i));
  const ArmLaw& q = spec_.reference_law();
  reference_cdf_.resize(n);
  for (int i = 0; i < n; ++i) reference_cdf_(i) = q.cdf(grid_.node(i));
  reference_quantiles_.resize(m);
  for (int i = 0; i < m; ++i) reference_quantiles_(i) = q.quantile((i + 0.5) / m);
}

double UtilityModel::wasserstein_utility_from_cdf(
    const Eigen::VectorXd& cdf) const {
  // Invert the piecewise-linear interpolant of the tabulated cdf at the
  // interior nodes u_i = (i + 1/2) / m, sweeping both monotone sequences.
  const int m = grid_.intervals;
  const double h = grid_.step();
  double acc = 0.0;
  int j = 1;
  for (int i = 0; i < m; ++i) {
    const double u = (i + 0.5) / m;
    while (j < m && cdf(j) < u) ++j;
    const double f0 = cdf(j - 1), f1 = cdf(j);
    const double t = f1 > f0 ? std::clamp((u - f0) / (f1 - f0), 0.0, 1.0) : 1.0;
    const double x = grid_.node(j - 1) + t * h;
    const double d = x - reference_quantiles_(i);
    acc += d * d;
  }
  return -acc / m;
}

double UtilityModel::utility(const Weights& w) const {
  if (w.size() != num_arms())
    throw std::invalid_argument("weights and arms differ in length");
  if (spec_.kind == UtilitySpec::Kind::Variance) {
    const double mean = means_.dot(w);
    return second_moments_.dot(w) - mean * mean;
  }
  return wasserstein_utility_from_cdf(mixture_cdf(w));
}

Eigen::VectorXd UtilityModel::gradient(const Weights& w) const {
  if (w.size() != num_arms())
    throw std::invalid_argument("weights and arms differ in length");
  if (spec_.kind == UtilitySpec::Kind::Variance)
    return variance_gradient(means_, second_moments_, w);
  const PotentialGrid pg =
      build_potential(mixture_cdf(w), spec_.reference_law(), grid_);
  const Eigen::VectorXd per_arm = pg.integrate_columns(cdf_table_);
  const double mean_phi = w.dot(per_arm);
  return kWassersteinScoreScale *
         (Eigen::VectorXd::Constant(w.size(), mean_phi) - per_arm);
}

ScoreSnapshot UtilityModel::exact_snapshot(const Weights& w, int round) const {
  if (spec_.kind == UtilitySpec::Kind::Variance) {
    const double mean = means_.dot(w);
    const double var = second_moments_.dot(w) - mean * mean;
    return ScoreSnapshot(
        [mean, var](double r) { return variance_if(mean, var, r); },
        ScoreSource::Exact, round);
  }
  const Eigen::VectorXd cdf = mixture_cdf(w);
  auto pg = std::make_shared<const PotentialGrid>(
      build_potential(cdf, spec_.reference_law(), grid_));
  const double mean_phi = pg->integrate(cdf);
  return ScoreSnapshot(
      [pg, mean_phi](double r) {
        return kWassersteinScoreScale * wasserstein_if(*pg, mean_phi, r);
      },
      ScoreSource::Exact, round);
}

}  // namespace distbandit
