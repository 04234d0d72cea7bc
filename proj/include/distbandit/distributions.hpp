#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "distbandit/rng.hpp"

namespace distbandit {

/// Regularized incomplete beta I_x(a, b), continued fraction (modified
/// Lentz) with 1e-12 relative tolerance.
double incomplete_beta(double a, double b, double x);

double normal_cdf(double z);
double normal_pdf(double z);

struct Moments {
  double mean = 0.0;
  double second_moment = 0.0;
  double variance = 0.0;
};

/// A reward law on a bounded interval [lo, hi].
class ArmLaw {
 public:
  enum class Kind { Beta, TruncGauss, Uniform };

  static ArmLaw beta(double alpha, double beta);
  static ArmLaw trunc_gauss(double mu, double sigma2, double lo, double hi);
  static ArmLaw uniform(double lo, double hi);

  Kind kind() const { return kind_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  // Beta: (alpha, beta). TruncGauss: (mu, sigma2). Uniform: (lo, hi).
  double param1() const { return p1_; }
  double param2() const { return p2_; }

  /// 0 below the support, 1 above.
  double cdf(double x) const;
  double pdf(double x) const;
  /// Smallest x with cdf(x) >= p. Closed form for Uniform, bisection to
  /// 1e-10 otherwise.
  double quantile(double p) const;
  Moments moments() const;
  /// Inverse-cdf draw; consumes exactly one engine output.
  double sample(Rng& rng) const;

  std::string describe() const;

 private:
  ArmLaw(Kind kind, double p1, double p2, double lo, double hi);

  Kind kind_;
  double p1_, p2_;
  double lo_, hi_;
  // Beta: log B(a, b). TruncGauss: sigma and the normalizer Z.
  double aux0_ = 0.0, aux1_ = 0.0;
  // TruncGauss: standardized truncation points.
  double alpha_ = 0.0, beta_ = 0.0;
};

inline constexpr double kInversionTol = 1e-10;

/// Smallest x in [lo, hi] with cdf(x) >= p, by bisection to `tol`.
template <typename Cdf>
double invert_cdf(const Cdf& cdf, double p, double lo, double hi,
                  double tol = kInversionTol) {
  if (p <= 0.0) return lo;
  if (p >= 1.0) return hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) >= p)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

/// Per-arm observed rewards, kept sorted, with running sums.
class EmpiricalArm {
 public:
  void add(double reward);

  std::size_t count() const { return samples_.size(); }
  double sum() const { return sum_; }
  double sum_sq() const { return sum_sq_; }
  std::span<const double> samples() const { return samples_; }

  /// Right-continuous step cdf. Throws std::logic_error when empty.
  double cdf(double x) const;

 private:
  std::vector<double> samples_;
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
};

/// Uniform quadrature nodes lo = x_0 < ... < x_M = hi.
struct QuadratureGrid {
  double lo = 0.0;
  double hi = 1.0;
  int intervals = 4096;

  QuadratureGrid() = default;
  QuadratureGrid(double lo_, double hi_, int m = 4096);

  double step() const { return (hi - lo) / intervals; }
  double node(int i) const { return lo + step() * i; }
  int size() const { return intervals + 1; }
  Eigen::VectorXd nodes() const;
  bool covers(double a, double b) const;
};

/// The weight-w convex combination of arm laws.
class MixtureView {
 public:
  MixtureView(std::span<const ArmLaw> arms, Eigen::VectorXd weights);

  double cdf(double x) const;
  double pdf(double x) const;
  /// Bisection inversion of the mixture cdf over the union of supports.
  double quantile(double p) const;
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  std::span<const ArmLaw> arms_;
  Eigen::VectorXd weights_;
  double lo_, hi_;
};

/// Smallest interval containing every support.
std::pair<double, double> common_support(std::span<const ArmLaw> arms);

/// Composite trapezoid approximation of the integral of |F - G| over the
/// grid.
template <typename F, typename G>
double w1_distance(const F& f, const G& g, const QuadratureGrid& grid) {
  const double h = grid.step();
  double acc = 0.5 * (std::abs(f(grid.lo) - g(grid.lo)) +
                      std::abs(f(grid.hi) - g(grid.hi)));
  for (int i = 1; i < grid.intervals; ++i) {
    const double x = grid.node(i);
    acc += std::abs(f(x) - g(x));
  }
  return acc * h;
}

/// W1 between two laws; the grid must cover both supports.
double w1_distance(const ArmLaw& p, const ArmLaw& q,
                   const QuadratureGrid& grid);

/// Square root of the interior-grid rule for the integral over (0,1) of
/// (F^{-1}(u) - G^{-1}(u))^2, nodes u = (i + 1/2) / m.
template <typename FQ, typename GQ>
double w2_distance(const FQ& f_quantile, const GQ& g_quantile,
                   int m = 4096) {
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    const double u = (i + 0.5) / m;
    const double d = f_quantile(u) - g_quantile(u);
    acc += d * d;
  }
  return std::sqrt(acc / m);
}

double w2_distance(const ArmLaw& p, const ArmLaw& q, int m = 4096);

}  // namespace distbandit
