#include "distbandit/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "distbandit/rng.hpp"

namespace distbandit {

const char* to_string(OracleResult::Method method) {
  return method == OracleResult::Method::Grid2 ? "grid2" : "deterministic_ascent";
}

double kkt_certificate(const Eigen::VectorXd& gradient, const Weights& w,
                       double gamma, double active_tol) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (w(k) > gamma + active_tol) {
      lo = std::min(lo, gradient(k));
      hi = std::max(hi, gradient(k));
    }
  }
  if (hi < lo) return 0.0;
  double residual = hi - lo;
  for (Eigen::Index k = 0; k < w.size(); ++k)
    if (w(k) <= gamma + active_tol) residual = std::max(residual, gradient(k) - hi);
  return residual;
}

namespace {

struct AscentRun {
  Weights w;
  double u;
  int iterations;
};

AscentRun mirror_ascent(const UtilityModel& model, const FloorParams& floor,
                        Weights w, const OracleOptions& opt) {
  w = kl_project_floor(w, floor);
  double u = model.utility(w);
  double eta = 0.5;
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    const Eigen::VectorXd g = model.gradient(w);
    if (kkt_certificate(g, w, floor.gamma) < opt.stop_certificate) break;
    const Weights cand = kl_project_floor(mw_update(w, g, eta), floor);
    const double uc = model.utility(cand);
    if (uc >= u) {
      const bool moved = (cand - w).cwiseAbs().maxCoeff() > 0.0;
      w = cand;
      u = uc;
      eta = std::min(2.0 * eta, 1e6);
      if (!moved) break;
    } else {
      eta *= 0.5;
      if (eta < 1e-14) break;
    }
  }
  return {w, u, it};
}

Weights dirichlet_start(Eigen::Index k, Rng& rng) {
  Weights w(k);
  for (Eigen::Index i = 0; i < k; ++i) w(i) = -std::log1p(-uniform01(rng));
  return w / w.sum();
}

// Golden-section maximization of a concave function on [a, b].
template <typename F>
double golden_max(const F& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Later candidates must beat the incumbent by more than round-off, so flat
// objectives keep the uniform start.
bool improves(double candidate, double incumbent) {
  return candidate > incumbent + 1e-13 * (1.0 + std::abs(incumbent));
}

}  // namespace

OracleResult solve_offline(const UtilityModel& model, double gamma,
                           const OracleOptions& options) {
  const Eigen::Index k = model.num_arms();
  const FloorParams floor(gamma, k);

  OracleResult best;
  best.ustar = -std::numeric_limits<double>::infinity();
  int total_iterations = 0;
  for (int s = 0; s <= options.random_starts; ++s) {
    Weights start = uniform_weights(k);
    if (s > 0) {
      Rng rng = substream(options.seed, static_cast<std::uint64_t>(s), 0x0AC1E);
      start = dirichlet_start(k, rng);
    }
    const AscentRun run = mirror_ascent(model, floor, start, options);
    total_iterations += run.iterations;
    if (s == 0 || improves(run.u, best.ustar)) {
      best.wstar = run.w;
      best.ustar = run.u;
    }
  }
  best.iterations = total_iterations;

  if (k == 2) {
    auto along = [&](double a) {
      Weights w(2);
      w << a, 1.0 - a;
      return model.utility(w);
    };
    const double a = golden_max(along, gamma, 1.0 - gamma, 1e-9);
    const double ua = along(a);
    if (std::abs(ua - best.ustar) > 1e-5) best.converged = false;
    if (improves(ua, best.ustar)) {
      best.wstar = Weights(2);
      best.wstar << a, 1.0 - a;
      best.wstar = kl_project_floor(best.wstar, floor);
      best.ustar = model.utility(best.wstar);
      best.method = OracleResult::Method::Grid2;
    }
  }

  best.certificate = kkt_certificate(model.gradient(best.wstar), best.wstar, gamma);
  if (best.certificate > options.flag_certificate) best.converged = false;
  return best;
}

int active_support(const Weights& wstar, double gamma, double tol) {
  return static_cast<int>((wstar.array() > gamma + tol).count());
}

}  // namespace distbandit
