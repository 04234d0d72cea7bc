#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Core>

namespace distbandit {

/// A point of the probability simplex.
using Weights = Eigen::VectorXd;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kLogFloor = 1e-300;

/// Floor constraint defining the truncated simplex {w : w_k >= gamma}.
struct FloorParams {
  double gamma;
  Eigen::Index arms;

  FloorParams(double gamma_, Eigen::Index arms_) : gamma(gamma_), arms(arms_) {
    if (arms < 2) throw std::invalid_argument("floor needs at least two arms");
    if (!(gamma > 0.0) || !(gamma * static_cast<double>(arms) < 1.0))
      throw std::invalid_argument("floor requires 0 < gamma and gamma*K < 1");
  }
};

template <typename Derived>
VectorX<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived>& h) {
  using std::exp;
  const auto shifted = (h.array() - h.maxCoeff()).exp().eval();
  return (shifted / shifted.sum()).matrix();
}

/// diag(w) - w w^T with w = softmax(h).
template <typename Derived>
MatrixX<typename Derived::Scalar> softmax_jacobian(
    const Eigen::MatrixBase<Derived>& h) {
  const auto w = softmax(h);
  MatrixX<typename Derived::Scalar> jac = -w * w.transpose();
  jac.diagonal() += w;
  return jac;
}

/// sum_k u_k log(u_k / w_k) with 0 log 0 = 0; +inf if u is not absolutely
/// continuous with respect to w.
template <typename DerivedU, typename DerivedW>
typename DerivedU::Scalar kl_divergence(const Eigen::MatrixBase<DerivedU>& u,
                                        const Eigen::MatrixBase<DerivedW>& w) {
  using Scalar = typename DerivedU::Scalar;
  using std::log;
  Scalar acc(0);
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    if (u(k) <= Scalar(0)) continue;
    if (w(k) <= Scalar(0)) return std::numeric_limits<Scalar>::infinity();
    acc += u(k) * (log(u(k)) - log(std::max<Scalar>(w(k), kLogFloor)));
  }
  return std::max(acc, Scalar(0));
}

/// Entropic mirror-ascent step w_k exp(eta g_k) / normalizer.
template <typename DerivedW, typename DerivedG>
VectorX<typename DerivedW::Scalar> mw_update(
    const Eigen::MatrixBase<DerivedW>& w, const Eigen::MatrixBase<DerivedG>& g,
    typename DerivedW::Scalar eta) {
  if (!g.allFinite()) throw std::invalid_argument("mw_update: non-finite gradient");
  if (w.size() != g.size())
    throw std::invalid_argument("mw_update: size mismatch");
  const auto logits =
      (w.array().max(kLogFloor).log() + eta * g.array()).eval();
  return softmax(logits.matrix());
}

/// KL (Bregman) projection onto {u >= gamma, sum u = 1}: clip-and-rescale
/// u_k = max(gamma, c w_k). Coordinates exactly at c w_k = gamma stay
/// unclipped.
template <typename Derived>
VectorX<typename Derived::Scalar> kl_project_floor(
    const Eigen::MatrixBase<Derived>& w, const FloorParams& fp) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = w.size();
  if (n != fp.arms) throw std::invalid_argument("kl_project_floor: size mismatch");
  const Scalar gamma(fp.gamma);
  Eigen::Array<bool, Eigen::Dynamic, 1> clipped =
      Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(n, false);
  Scalar scale(1);
  for (Eigen::Index round = 0; round <= n; ++round) {
    Scalar free_mass(0);
    Eigen::Index n_clipped = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (clipped(k))
        ++n_clipped;
      else
        free_mass += w(k);
    }
    scale = (Scalar(1) - gamma * Scalar(n_clipped)) / free_mass;
    bool changed = false;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!clipped(k) && scale * w(k) < gamma) {
        clipped(k) = true;
        changed = true;
      }
    }
    if (!changed) break;
  }
  VectorX<Scalar> out(n);
  for (Eigen::Index k = 0; k < n; ++k)
    out(k) = clipped(k) ? gamma : scale * w(k);
  return out;
}

/// Upper bound log(1/gamma - (K-1)) on KL between two points of the
/// truncated simplex.
inline double kl_diameter_bound(Eigen::Index arms, double gamma) {
  return std::log(1.0 / gamma - static_cast<double>(arms - 1));
}

template <typename Derived>
bool is_simplex_point(const Eigen::MatrixBase<Derived>& w, double tol = 1e-12) {
  return w.size() > 0 && (w.array() >= 0.0).all() && std::abs(w.sum() - 1.0) <= tol;
}

template <typename Derived>
bool in_truncated_simplex(const Eigen::MatrixBase<Derived>& w, double gamma,
                          double tol = 1e-12) {
  return is_simplex_point(w, tol) && w.minCoeff() >= gamma - tol;
}

inline Weights uniform_weights(Eigen::Index arms) {
  return Weights::Constant(arms, 1.0 / static_cast<double>(arms));
}

}  // namespace distbandit
