#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "distbandit/simplex.hpp"
#include "distbandit/utility.hpp"

namespace distbandit {

struct OracleOptions {
  int max_iterations = 200000;
  int random_starts = 8;
  std::uint64_t seed = 0;
  // Stop a start once its KKT residual falls below this.
  double stop_certificate = 1e-11;
  // Residual above which the result is flagged as not converged.
  double flag_certificate = 1e-4;
};

struct OracleResult {
  enum class Method { DeterministicAscent, Grid2 };

  Weights wstar;
  double ustar = 0.0;
  Method method = Method::DeterministicAscent;
  int iterations = 0;
  double certificate = 0.0;
  bool converged = true;
};

const char* to_string(OracleResult::Method method);

/// First-order optimality residual on the truncated simplex: spread of the
/// gradient over coordinates above the floor, plus any floored coordinate
/// whose gradient exceeds that level.
double kkt_certificate(const Eigen::VectorXd& gradient, const Weights& w,
                       double gamma, double active_tol = 1e-6);

/// Maximizer of U over the truncated simplex: multi-start deterministic
/// entropic mirror ascent with exact gradients and backtracking step
/// sizes; for two arms, cross-checked by golden-section search on the
/// segment.
OracleResult solve_offline(const UtilityModel& model, double gamma,
                           const OracleOptions& options = {});

/// Coordinates strictly above the floor by more than `tol`.
int active_support(const Weights& wstar, double gamma, double tol = 1e-4);

}  // namespace distbandit
