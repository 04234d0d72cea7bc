#include "distbandit/distributions.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <sstream>

namespace distbandit {

namespace {

double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-12;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Upper-tail normal probability, accurate far into the tail.
double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

ArmLaw::ArmLaw(Kind kind, double p1, double p2, double lo, double hi)
    : kind_(kind), p1_(p1), p2_(p2), lo_(lo), hi_(hi) {}

ArmLaw ArmLaw::beta(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::invalid_argument("Beta parameters must be positive");
  ArmLaw law(Kind::Beta, alpha, beta, 0.0, 1.0);
  law.aux0_ = log_beta(alpha, beta);
  return law;
}

ArmLaw ArmLaw::trunc_gauss(double mu, double sigma2, double lo, double hi) {
  if (!(sigma2 > 0.0))
    throw std::invalid_argument("TruncGauss variance must be positive");
  if (!(lo < hi))
    throw std::invalid_argument("TruncGauss support requires lo < hi");
  if (!std::isfinite(mu) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("TruncGauss parameters must be finite");
  ArmLaw law(Kind::TruncGauss, mu, sigma2, lo, hi);
  const double sigma = std::sqrt(sigma2);
  law.aux0_ = sigma;
  law.alpha_ = (lo - mu) / sigma;
  law.beta_ = (hi - mu) / sigma;
  // Work on whichever side keeps the difference of tail masses accurate.
  law.aux1_ = law.alpha_ > 0.0 ? normal_sf(law.alpha_) - normal_sf(law.beta_)
                               : normal_cdf(law.beta_) - normal_cdf(law.alpha_);
  if (!(law.aux1_ > 0.0))
    throw std::invalid_argument("TruncGauss support has zero mass");
  return law;
}

ArmLaw ArmLaw::uniform(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("Uniform requires lo < hi");
  return ArmLaw(Kind::Uniform, lo, hi, lo, hi);
}

double ArmLaw::cdf(double x) const {
  if (x <= lo_) return 0.0;
  if (x >= hi_) return 1.0;
  switch (kind_) {
    case Kind::Uniform:
      return (x - lo_) / (hi_ - lo_);
    case Kind::Beta:
      return incomplete_beta(p1_, p2_, x);
    case Kind::TruncGauss: {
      const double z = (x - p1_) / aux0_;
      const double v = alpha_ > 0.0 ? (normal_sf(alpha_) - normal_sf(z)) / aux1_
                                    : (normal_cdf(z) - normal_cdf(alpha_)) / aux1_;
      return std::clamp(v, 0.0, 1.0);
    }
  }
  return 0.0;
}

double ArmLaw::pdf(double x) const {
  if (x < lo_ || x > hi_) return 0.0;
  switch (kind_) {
    case Kind::Uniform:
      return 1.0 / (hi_ - lo_);
    case Kind::Beta:
      if (x <= 0.0) return p1_ < 1.0 ? std::numeric_limits<double>::infinity()
                                     : (p1_ == 1.0 ? std::exp(-aux0_) : 0.0);
      if (x >= 1.0) return p2_ < 1.0 ? std::numeric_limits<double>::infinity()
                                     : (p2_ == 1.0 ? std::exp(-aux0_) : 0.0);
      return std::exp((p1_ - 1.0) * std::log(x) + (p2_ - 1.0) * std::log1p(-x) -
                      aux0_);
    case Kind::TruncGauss:
      return normal_pdf((x - p1_) / aux0_) / (aux0_ * aux1_);
  }
  return 0.0;
}

double ArmLaw::quantile(double p) const {
  if (p <= 0.0) return lo_;
  if (p >= 1.0) return hi_;
  if (kind_ == Kind::Uniform) return lo_ + p * (hi_ - lo_);
  return invert_cdf([this](double x) { return cdf(x); }, p, lo_, hi_);
}

Moments ArmLaw::moments() const {
  Moments m;
  switch (kind_) {
    case Kind::Uniform:
      m.mean = 0.5 * (lo_ + hi_);
      m.second_moment = (hi_ * hi_ + hi_ * lo_ + lo_ * lo_) / 3.0;
      m.variance = (hi_ - lo_) * (hi_ - lo_) / 12.0;
      return m;
    case Kind::Beta: {
      const double s = p1_ + p2_;
      m.mean = p1_ / s;
      m.second_moment = p1_ * (p1_ + 1.0) / (s * (s + 1.0));
      m.variance = p1_ * p2_ / (s * s * (s + 1.0));
      return m;
    }
    case Kind::TruncGauss: {
      const double sigma = aux0_;
      const double pa = normal_pdf(alpha_);
      const double pb = normal_pdf(beta_);
      const double r = (pa - pb) / aux1_;
      // alpha*phi(alpha) vanishes in the far tails; guard inf * 0.
      const double ta = std::isfinite(alpha_) && pa > 0.0 ? alpha_ * pa : 0.0;
      const double tb = std::isfinite(beta_) && pb > 0.0 ? beta_ * pb : 0.0;
      m.mean = p1_ + sigma * r;
      m.variance = p2_ * (1.0 + (ta - tb) / aux1_ - r * r);
      m.second_moment = m.variance + m.mean * m.mean;
      return m;
    }
  }
  return m;
}

double ArmLaw::sample(Rng& rng) const { return quantile(uniform01(rng)); }

std::string ArmLaw::describe() const {
  std::ostringstream os;
  os.precision(9);
  switch (kind_) {
    case Kind::Beta:
      os << "Beta(" << p1_ << "," << p2_ << ")";
      break;
    case Kind::TruncGauss:
      os << "TruncGauss(" << p1_ << "," << p2_ << "," << lo_ << "," << hi_ << ")";
      break;
    case Kind::Uniform:
      os << "Uniform(" << lo_ << "," << hi_ << ")";
      break;
  }
  return os.str();
}

void EmpiricalArm::add(double reward) {
  samples_.insert(std::upper_bound(samples_.begin(), samples_.end(), reward),
                  reward);
  sum_ += reward;
  sum_sq_ += reward * reward;
}

double EmpiricalArm::cdf(double x) const {
  if (samples_.empty())
    throw std::logic_error("empirical cdf of an arm with no samples");
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
  return static_cast<double>(it - samples_.begin()) /
         static_cast<double>(samples_.size());
}

QuadratureGrid::QuadratureGrid(double lo_, double hi_, int m)
    : lo(lo_), hi(hi_), intervals(m) {
  if (!(lo < hi)) throw std::invalid_argument("grid requires lo < hi");
  if (m < 1) throw std::invalid_argument("grid needs at least one interval");
}

Eigen::VectorXd QuadratureGrid::nodes() const {
  Eigen::VectorXd x(size());
  for (int i = 0; i < size(); ++i) x(i) = node(i);
  x(intervals) = hi;
  return x;
}

bool QuadratureGrid::covers(double a, double b) const {
  return lo <= a && b <= hi;
}

MixtureView::MixtureView(std::span<const ArmLaw> arms, Eigen::VectorXd weights)
    : arms_(arms), weights_(std::move(weights)) {
  if (arms_.empty()) throw std::invalid_argument("mixture needs arms");
  if (static_cast<std::size_t>(weights_.size()) != arms_.size())
    throw std::invalid_argument("mixture weights and arms differ in length");
  std::tie(lo_, hi_) = common_support(arms_);
}

double MixtureView::cdf(double x) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < arms_.size(); ++k)
    if (weights_(k) != 0.0) acc += weights_(k) * arms_[k].cdf(x);
  return std::clamp(acc, 0.0, 1.0);
}

double MixtureView::pdf(double x) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < arms_.size(); ++k)
    if (weights_(k) != 0.0) acc += weights_(k) * arms_[k].pdf(x);
  return acc;
}

double MixtureView::quantile(double p) const {
  return invert_cdf([this](double x) { return cdf(x); }, p, lo_, hi_);
}

std::pair<double, double> common_support(std::span<const ArmLaw> arms) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& a : arms) {
    lo = std::min(lo, a.lo());
    hi = std::max(hi, a.hi());
  }
  return {lo, hi};
}

double w1_distance(const ArmLaw& p, const ArmLaw& q,
                   const QuadratureGrid& grid) {
  if (!grid.covers(p.lo(), p.hi()) || !grid.covers(q.lo(), q.hi()))
    throw std::invalid_argument("W1 grid does not cover both supports");
  return w1_distance([&](double x) { return p.cdf(x); },
                     [&](double x) { return q.cdf(x); }, grid);
}

double w2_distance(const ArmLaw& p, const ArmLaw& q, int m) {
  return w2_distance([&](double u) { return p.quantile(u); },
                     [&](double u) { return q.quantile(u); }, m);
}

}  // namespace distbandit
