#include "distbandit/ascent.hpp"

#include <cmath>
#include <stdexcept>

#include "distbandit/diagnostics.hpp"

namespace distbandit {

const char* to_string(ScoreMode mode) {
  return mode == ScoreMode::ExactIF ? "exact" : "estimated";
}

const char* to_string(Schedule schedule) {
  return schedule == Schedule::Constant ? "constant" : "inv_sqrt";
}

void AscentConfig::validate(Eigen::Index arms) const {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (!(eta0 > 0.0)) throw std::invalid_argument("eta0 must be > 0");
  FloorParams(gamma, arms);
  prior.validate();
  if (bias_every < 0) throw std::invalid_argument("bias_every must be >= 0");
  if (bias_every > 0 && n_mc < 2) throw std::invalid_argument("n_mc must be >= 2");
}

double step_size(int t, const AscentConfig& cfg) {
  if (t < 1) throw std::invalid_argument("step_size: t must be >= 1");
  return cfg.schedule == Schedule::Constant
             ? cfg.eta0
             : cfg.eta0 / std::sqrt(static_cast<double>(t));
}

StepResult step(int t, const Weights& w, const AscentConfig& cfg,
                const UtilityModel& model, PluginState& state, Rng& rng) {
  const FloorParams floor(cfg.gamma, w.size());
  // Built from rounds 1..t-1 only.
  const ScoreSnapshot snap = cfg.mode == ScoreMode::ExactIF
                                 ? model.exact_snapshot(w, t)
                                 : build_plugin_snapshot(state, w, model, t);
  StepResult out;
  out.arm = sample_categorical(w, rng);
  out.reward = model.arms()[out.arm].sample(rng);
  out.score = snap(out.reward);
  out.ghat = score_gradient(w, out.arm, out.score);
  const Weights mirrored = mw_update(w, out.ghat, step_size(t, cfg));
  out.next = kl_project_floor(mirrored, floor);
  state.record(out.arm, out.reward);
  return out;
}

EpisodeTrace run_episode(const AscentConfig& cfg, const UtilityModel& model,
                         double ustar, Rng& rng, Rng& bias_rng) {
  const Eigen::Index k_arms = model.num_arms();
  cfg.validate(k_arms);

  EpisodeTrace trace;
  trace.steps.reserve(static_cast<std::size_t>(cfg.horizon));
  PluginState state(k_arms, cfg.prior);
  Weights w = kl_project_floor(uniform_weights(k_arms), FloorParams(cfg.gamma, k_arms));
  Weights running_sum = Weights::Zero(k_arms);

  for (int t = 1; t <= cfg.horizon; ++t) {
    StepRecord rec;
    rec.t = t;
    rec.w = w;
    running_sum += w;
    rec.wbar = running_sum / static_cast<double>(t);
    rec.utility = model.utility(w);
    rec.utility_avg = model.utility(rec.wbar);
    rec.gap = utility_gap(ustar, rec.utility_avg);

    if (cfg.bias_every > 0 && t % cfg.bias_every == 0) {
      BiasEstimate est;
      if (cfg.mode == ScoreMode::ExactIF) {
        const ScoreSnapshot exact = model.exact_snapshot(w, t);
        est = bias_mc(w, model.arms(), exact, exact, cfg.n_mc, bias_rng);
      } else {
        est = bias_mc(state, w, model, cfg.n_mc, bias_rng);
      }
      rec.bias_inf = est.inf_norm();
      rec.bias_se_max = est.max_se();
    }

    const StepResult res = step(t, w, cfg, model, state, rng);
    w = res.next;
    trace.steps.push_back(std::move(rec));
  }

  trace.wbar_final = trace.steps.back().wbar;
  trace.utility_final = trace.steps.back().utility_avg;
  trace.pulls.resize(static_cast<std::size_t>(k_arms));
  for (Eigen::Index k = 0; k < k_arms; ++k) trace.pulls[k] = state.arm(k).count();
  trace.w_final = w;
  trace.final_state = std::move(state);
  return trace;
}

EpisodeTrace run_episode(const AscentConfig& cfg, const UtilityModel& model,
                         double ustar, Rng& rng) {
  Rng bias_rng(rng());
  return run_episode(cfg, model, ustar, rng, bias_rng);
}

}  // namespace distbandit
