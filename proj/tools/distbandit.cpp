// distbandit: run influence-function mirror ascent experiments or solve
// the offline reference problem.
//
//   distbandit run --scenario S1 --utility variance --mode both --out DIR
//   distbandit oracle --scenario S1 --utility wasserstein --gamma 0.03

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "distbandit/experiment.hpp"
#include "distbandit/oracle.hpp"

namespace {

using distbandit::ConfigError;
using distbandit::OutputError;
using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> scenario, utility, mode, schedule, out, reference;
  std::optional<int> horizon, episodes, bias_every, n_mc, grid, jobs;
  std::optional<double> gamma, eta0, alpha0, m0, s0;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> arms;
  bool plots = false;
};

void add_instance_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON config file; flags override it");
  cmd->add_option("--scenario", f.scenario, "S1, S2, S3, S4 or custom");
  cmd->add_option("--utility", f.utility, "variance or wasserstein");
  cmd->add_option("--reference", f.reference, "Wasserstein reference law, e.g. Uniform(0,1)");
  cmd->add_option("--arm", f.arms, "arm law for a custom scenario (repeatable)");
  cmd->add_option("--gamma", f.gamma, "exploration floor");
  cmd->add_option("--grid", f.grid, "quadrature intervals");
  cmd->add_option("--seed", f.seed, "experiment seed");
}

json merged_settings(const Flags& f) {
  json s = f.config ? distbandit::load_config_file(*f.config) : json::object();
  if (!s.is_object()) throw ConfigError("config must be a JSON object");
  auto put = [&](const char* key, const auto& opt) {
    if (opt) s[key] = *opt;
  };
  put("scenario", f.scenario);
  put("utility", f.utility);
  put("reference", f.reference);
  put("mode", f.mode);
  put("schedule", f.schedule);
  put("out", f.out);
  put("T", f.horizon);
  put("episodes", f.episodes);
  put("bias_every", f.bias_every);
  put("n_mc", f.n_mc);
  put("grid", f.grid);
  put("jobs", f.jobs);
  put("gamma", f.gamma);
  put("eta0", f.eta0);
  put("alpha0", f.alpha0);
  put("m0", f.m0);
  put("s0", f.s0);
  put("seed", f.seed);
  if (!f.arms.empty()) s["arms"] = f.arms;
  if (f.plots) s["plots"] = true;
  return s;
}

int run_command(const Flags& f) {
  const distbandit::ExperimentConfig cfg = distbandit::parse_config(merged_settings(f));
  const distbandit::ExperimentResult res = distbandit::run_experiment(cfg);
  std::printf("oracle ustar=%s certificate=%s\n",
              distbandit::format_float(res.oracle.ustar).c_str(),
              distbandit::format_float(res.oracle.certificate).c_str());
  for (const auto& m : res.modes)
    std::printf("%-9s final gap %s (se %s), regret %s\n", distbandit::to_string(m.mode),
                distbandit::format_float(m.gap_mean.back()).c_str(),
                distbandit::format_float(m.gap_se.back()).c_str(),
                distbandit::format_float(m.regret_mean).c_str());
  std::printf("wrote %s\n", cfg.output_dir.c_str());
  return 0;
}

int oracle_command(const Flags& f) {
  const distbandit::ExperimentConfig cfg = distbandit::parse_config(merged_settings(f));
  const distbandit::UtilityModel model(cfg.scenario.arms, cfg.utility, cfg.grid);
  distbandit::OracleOptions opt;
  opt.seed = cfg.seed;
  const distbandit::OracleResult r = distbandit::solve_offline(model, cfg.gamma, opt);
  std::printf("wstar");
  for (Eigen::Index k = 0; k < r.wstar.size(); ++k)
    std::printf(" %s", distbandit::format_float(r.wstar(k)).c_str());
  std::printf("\nustar %s\ncertificate %s\nmethod %s\nconverged %s\n",
              distbandit::format_float(r.ustar).c_str(),
              distbandit::format_float(r.certificate).c_str(),
              distbandit::to_string(r.method), r.converged ? "yes" : "no");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical-utility bandits via influence-function mirror ascent"};
  app.require_subcommand(1);

  Flags run_flags;
  CLI::App* run = app.add_subcommand("run", "run replicated episodes and write CSV/JSON results");
  add_instance_flags(run, run_flags);
  run->add_option("--mode", run_flags.mode, "exact, estimated or both");
  run->add_option("--T", run_flags.horizon, "horizon");
  run->add_option("--episodes", run_flags.episodes, "independent replications");
  run->add_option("--eta0", run_flags.eta0, "initial step size");
  run->add_option("--schedule", run_flags.schedule, "inv_sqrt or constant");
  run->add_option("--alpha0", run_flags.alpha0, "count-prior size");
  run->add_option("--m0", run_flags.m0, "prior mean");
  run->add_option("--s0", run_flags.s0, "prior second moment");
  run->add_option("--bias-every", run_flags.bias_every, "bias diagnostic cadence (0 = off)");
  run->add_option("--n-mc", run_flags.n_mc, "Monte Carlo draws per bias estimate");
  run->add_option("--jobs", run_flags.jobs, "worker threads");
  run->add_option("--out", run_flags.out, "output directory");
  run->add_flag("--plots", run_flags.plots, "also write SVG plots");

  Flags oracle_flags;
  CLI::App* oracle = app.add_subcommand("oracle", "print the truncated-simplex optimum");
  add_instance_flags(oracle, oracle_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (run->parsed()) return run_command(run_flags);
    return oracle_command(oracle_flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const OutputError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
}
