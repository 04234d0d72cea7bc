#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "distbandit/ascent.hpp"
#include "distbandit/distributions.hpp"
#include "distbandit/oracle.hpp"
#include "distbandit/plugin.hpp"
#include "distbandit/utility.hpp"

namespace distbandit {

/// Invalid configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure writing results; the CLI maps it to exit code 3.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScenarioId { S1, S2, S3, S4, Custom };

struct ScenarioSpec {
  ScenarioId id = ScenarioId::S1;
  std::vector<ArmLaw> arms;
  double lo = 0.0;
  double hi = 1.0;
  std::string notes;
};

std::string to_string(ScenarioId id);
ScenarioId parse_scenario_id(const std::string& name);

/// Registry of the synthetic instances. S4 draws its 30 truncated
/// Gaussians once from `seed`.
ScenarioSpec make_scenario(ScenarioId id, std::uint64_t seed = 0);
ScenarioSpec make_custom_scenario(std::vector<ArmLaw> arms);

/// Parses "Beta(a,b)", "TruncGauss(mu,sigma2,lo,hi)" or "Uniform(lo,hi)".
ArmLaw parse_arm_law(const std::string& text);

enum class ModeSelection { ExactIF, EstimatedIF, Both };

struct ExperimentConfig {
  ScenarioSpec scenario;
  UtilitySpec utility;
  ModeSelection mode = ModeSelection::Both;
  int horizon = 2000;
  int episodes = 500;
  double gamma = 0.03;
  double eta0 = 0.5;
  Schedule schedule = Schedule::InvSqrt;
  PriorConfig prior;
  int bias_every = 25;
  int n_mc = 1000;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  int grid = 4096;
  bool plots = false;
  int jobs = 0;  // 0: available parallelism

  std::vector<ScoreMode> modes() const;
  AscentConfig ascent_config(ScoreMode mode) const;
  nlohmann::json to_json() const;
};

/// Resolves a JSON object of settings (file contents with command-line
/// overrides already merged in) into a complete configuration. Unknown
/// keys and invalid values raise ConfigError.
ExperimentConfig parse_config(const nlohmann::json& settings);

/// Reads a JSON config file; I/O or syntax problems raise ConfigError.
nlohmann::json load_config_file(const std::string& path);

/// Per-episode reduction of a trace.
struct EpisodeSummary {
  std::vector<double> gap;           // t = 1..T
  std::vector<double> regret;        // cumulative sum of U* - U(w_t)
  std::vector<int> bias_t;
  std::vector<double> bias_inf;
  std::vector<double> bias_se_max;
  Weights wbar_final;
  Weights w_final;
  std::vector<std::size_t> pulls;
  std::vector<double> empirical_cdf;  // diagnostic grid, Wasserstein only
};

struct ModeAggregate {
  ScoreMode mode = ScoreMode::ExactIF;
  int n = 0;
  std::vector<double> gap_mean, gap_se;
  std::vector<int> bias_t;
  std::vector<double> bias_mean, bias_se;
  Eigen::VectorXd wbar_mean, wbar_se;
  double regret_mean = 0.0, regret_se = 0.0;
  std::vector<EpisodeSummary> episodes;
};

struct DistributionDiagnostic {
  std::vector<double> x;
  std::vector<double> cdf_oracle;
  std::vector<double> cdf_learned;
  std::vector<double> cdf_empirical;
};

struct ExperimentResult {
  OracleResult oracle;
  std::vector<ModeAggregate> modes;
  std::optional<DistributionDiagnostic> diagnostic;
};

struct RunOptions {
  // Permute the order in which episodes are handed to workers.
  std::optional<std::uint64_t> shuffle_seed;
  bool write_files = true;
};

inline constexpr int kDiagnosticPoints = 512;

/// Runs every episode of every selected mode and aggregates mean and
/// standard error per checkpoint. Episode e of a mode uses the substream
/// (seed, e), so results do not depend on scheduling.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const RunOptions& options = {});

/// Oracle, learned and empirical mixture cdfs on a 512-point grid over the
/// instance support. Learned uses the mean final averaged weights and
/// empirical the mean regularized plug-in mixture at the final iterate.
DistributionDiagnostic emit_distribution_diagnostic(
    const ExperimentConfig& cfg, const UtilityModel& model, const Weights& wstar,
    const ModeAggregate& finals);

/// Regularized plug-in mixture cdf on the diagnostic grid.
std::vector<double> empirical_mixture_cdf(const PluginState& state,
                                          const Weights& w, const ArmLaw& q,
                                          double lo, double hi);

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result);

std::string format_float(double v);

}  // namespace distbandit
