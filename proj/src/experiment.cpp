#include "distbandit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "distbandit/diagnostics.hpp"
#include "distbandit/rng.hpp"

namespace distbandit {

using nlohmann::json;

namespace {

constexpr std::uint64_t kScenarioSalt = 0x5CE4A810ULL;
constexpr std::uint64_t kEpisodeSalt = 0xE915D0ULL;
constexpr std::uint64_t kBiasSalt = 0xB1A5ULL;

// Scenario-4 Gaussians are truncated to this interval.
constexpr double kGaussLo = -2.0;
constexpr double kGaussHi = 3.0;

}  // namespace

std::string to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::S1: return "S1";
    case ScenarioId::S2: return "S2";
    case ScenarioId::S3: return "S3";
    case ScenarioId::S4: return "S4";
    case ScenarioId::Custom: return "custom";
  }
  return "custom";
}

ScenarioId parse_scenario_id(const std::string& name) {
  if (name == "S1" || name == "s1") return ScenarioId::S1;
  if (name == "S2" || name == "s2") return ScenarioId::S2;
  if (name == "S3" || name == "s3") return ScenarioId::S3;
  if (name == "S4" || name == "s4") return ScenarioId::S4;
  if (name == "custom") return ScenarioId::Custom;
  throw ConfigError("unknown scenario '" + name + "'");
}

ScenarioSpec make_scenario(ScenarioId id, std::uint64_t seed) {
  ScenarioSpec s;
  s.id = id;
  switch (id) {
    case ScenarioId::S1:
      s.arms = {ArmLaw::beta(2, 2), ArmLaw::beta(4, 2)};
      s.notes = "2 Beta arms on [0,1]";
      break;
    case ScenarioId::S2:
      s.arms = {ArmLaw::beta(2, 8), ArmLaw::beta(8, 2), ArmLaw::beta(2, 2),
                ArmLaw::beta(20, 20)};
      s.notes = "4 Beta arms on [0,1]";
      break;
    case ScenarioId::S3:
      for (int k = 0; k < 8; ++k) s.arms.push_back(ArmLaw::beta(2, 1 + 3 * k));
      s.notes = "8 Beta arms (2, 1+3k) on [0,1]";
      break;
    case ScenarioId::S4: {
      Rng rng = substream(seed, 4, kScenarioSalt);
      for (int k = 0; k < 30; ++k) {
        const double mean = -0.5 + 2.0 * uniform01(rng);
        const double var = 0.08 + 0.27 * uniform01(rng);
        s.arms.push_back(ArmLaw::trunc_gauss(mean, var, kGaussLo, kGaussHi));
      }
      s.notes = "30 Gaussians truncated to [-2,3], drawn from the experiment seed";
      break;
    }
    case ScenarioId::Custom:
      throw ConfigError("custom scenarios need an explicit arm list");
  }
  std::tie(s.lo, s.hi) = common_support(s.arms);
  return s;
}

ScenarioSpec make_custom_scenario(std::vector<ArmLaw> arms) {
  if (arms.empty()) throw ConfigError("custom scenario needs at least one arm");
  ScenarioSpec s;
  s.id = ScenarioId::Custom;
  s.arms = std::move(arms);
  std::tie(s.lo, s.hi) = common_support(s.arms);
  s.notes = "custom";
  return s;
}

ArmLaw parse_arm_law(const std::string& text) {
  static const std::regex pattern(R"(\s*(\w+)\s*\(([^)]*)\)\s*)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern))
    throw ConfigError("cannot parse arm law '" + text + "'");
  std::vector<double> p;
  std::stringstream ss(m[2].str());
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      p.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("bad number in arm law '" + text + "'");
    }
  }
  const std::string kind = m[1].str();
  try {
    if (kind == "Beta" && p.size() == 2) return ArmLaw::beta(p[0], p[1]);
    if (kind == "Uniform" && p.size() == 2) return ArmLaw::uniform(p[0], p[1]);
    if (kind == "TruncGauss" && p.size() == 4)
      return ArmLaw::trunc_gauss(p[0], p[1], p[2], p[3]);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid arm law '") + text + "': " + e.what());
  }
  throw ConfigError("unknown arm law '" + text + "'");
}

std::vector<ScoreMode> ExperimentConfig::modes() const {
  switch (mode) {
    case ModeSelection::ExactIF: return {ScoreMode::ExactIF};
    case ModeSelection::EstimatedIF: return {ScoreMode::EstimatedIF};
    case ModeSelection::Both: return {ScoreMode::ExactIF, ScoreMode::EstimatedIF};
  }
  return {};
}

AscentConfig ExperimentConfig::ascent_config(ScoreMode m) const {
  AscentConfig a;
  a.horizon = horizon;
  a.gamma = gamma;
  a.eta0 = eta0;
  a.schedule = schedule;
  a.mode = m;
  a.prior = prior;
  a.bias_every = bias_every;
  a.n_mc = n_mc;
  return a;
}

json ExperimentConfig::to_json() const {
  json j;
  j["scenario"] = to_string(scenario.id);
  std::vector<std::string> arms;
  for (const auto& a : scenario.arms) arms.push_back(a.describe());
  j["arms"] = arms;
  j["support"] = {scenario.lo, scenario.hi};
  j["utility"] = utility.name();
  if (utility.reference) j["reference"] = utility.reference->describe();
  j["mode"] = mode == ModeSelection::Both
                  ? "both"
                  : (mode == ModeSelection::ExactIF ? "exact" : "estimated");
  j["T"] = horizon;
  j["episodes"] = episodes;
  j["gamma"] = gamma;
  j["eta0"] = eta0;
  j["schedule"] = to_string(schedule);
  j["alpha0"] = prior.alpha0;
  j["m0"] = prior.m0;
  j["s0"] = prior.s0;
  j["bias_every"] = bias_every;
  j["n_mc"] = n_mc;
  j["seed"] = seed;
  j["out"] = output_dir;
  j["grid"] = grid;
  j["plots"] = plots;
  j["jobs"] = jobs;
  return j;
}

namespace {

template <typename T>
T get_as(const json& settings, const char* key, T fallback) {
  if (!settings.contains(key)) return fallback;
  try {
    return settings.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

}  // namespace

ExperimentConfig parse_config(const json& settings) {
  static const std::set<std::string> known = {
      "scenario", "utility", "mode",  "T",     "episodes", "gamma",
      "eta0",     "schedule", "alpha0", "m0",  "s0",       "bias_every",
      "n_mc",     "seed",    "out",   "grid",  "plots",    "jobs",
      "arms",     "reference"};
  if (!settings.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : settings.items())
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");

  ExperimentConfig cfg;
  cfg.seed = get_as<std::uint64_t>(settings, "seed", 0);

  const ScenarioId id = parse_scenario_id(get_as<std::string>(settings, "scenario", "S1"));
  if (id == ScenarioId::Custom) {
    if (!settings.contains("arms")) throw ConfigError("custom scenario needs 'arms'");
    std::vector<ArmLaw> arms;
    for (const auto& a : get_as<std::vector<std::string>>(settings, "arms", {}))
      arms.push_back(parse_arm_law(a));
    cfg.scenario = make_custom_scenario(std::move(arms));
  } else {
    if (settings.contains("arms")) throw ConfigError("'arms' is only valid for custom scenarios");
    cfg.scenario = make_scenario(id, cfg.seed);
  }

  const std::string utility = get_as<std::string>(settings, "utility", "variance");
  if (utility == "variance") {
    cfg.utility = UtilitySpec::variance();
  } else if (utility == "wasserstein") {
    const std::string ref = get_as<std::string>(settings, "reference", "Uniform(0,1)");
    cfg.utility = UtilitySpec::wasserstein(parse_arm_law(ref));
  } else {
    throw ConfigError("unknown utility '" + utility + "'");
  }

  const std::string mode = get_as<std::string>(settings, "mode", "both");
  if (mode == "both")
    cfg.mode = ModeSelection::Both;
  else if (mode == "exact")
    cfg.mode = ModeSelection::ExactIF;
  else if (mode == "estimated")
    cfg.mode = ModeSelection::EstimatedIF;
  else
    throw ConfigError("unknown mode '" + mode + "'");

  const std::string schedule = get_as<std::string>(settings, "schedule", "inv_sqrt");
  if (schedule == "inv_sqrt")
    cfg.schedule = Schedule::InvSqrt;
  else if (schedule == "constant")
    cfg.schedule = Schedule::Constant;
  else
    throw ConfigError("unknown schedule '" + schedule + "'");

  cfg.horizon = get_as<int>(settings, "T", cfg.horizon);
  cfg.episodes = get_as<int>(settings, "episodes", cfg.episodes);
  cfg.gamma = get_as<double>(settings, "gamma", cfg.gamma);
  cfg.eta0 = get_as<double>(settings, "eta0", cfg.eta0);
  cfg.bias_every = get_as<int>(settings, "bias_every", cfg.bias_every);
  cfg.n_mc = get_as<int>(settings, "n_mc", cfg.n_mc);
  cfg.output_dir = get_as<std::string>(settings, "out", cfg.output_dir);
  cfg.grid = get_as<int>(settings, "grid", cfg.grid);
  cfg.plots = get_as<bool>(settings, "plots", cfg.plots);
  cfg.jobs = get_as<int>(settings, "jobs", cfg.jobs);

  const double alpha0 = get_as<double>(settings, "alpha0", 1.0);
  cfg.prior = PriorConfig::uninformative(cfg.scenario.lo, cfg.scenario.hi, alpha0);
  cfg.prior.m0 = get_as<double>(settings, "m0", cfg.prior.m0);
  cfg.prior.s0 = get_as<double>(settings, "s0", cfg.prior.s0);

  const auto k = static_cast<Eigen::Index>(cfg.scenario.arms.size());
  if (k < 2) throw ConfigError("at least two arms are required");
  if (cfg.horizon < 1) throw ConfigError("T must be >= 1");
  if (cfg.episodes < 1) throw ConfigError("episodes must be >= 1");
  if (!(cfg.gamma > 0.0) || !(cfg.gamma * static_cast<double>(k) < 1.0))
    throw ConfigError("gamma must satisfy 0 < gamma and gamma*K < 1");
  if (!(cfg.eta0 > 0.0)) throw ConfigError("eta0 must be > 0");
  if (cfg.bias_every < 0) throw ConfigError("bias_every must be >= 0");
  if (cfg.n_mc < 2) throw ConfigError("n_mc must be >= 2");
  if (cfg.grid < 16) throw ConfigError("grid must be >= 16");
  if (cfg.jobs < 0) throw ConfigError("jobs must be >= 0");
  try {
    cfg.prior.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(cfg.prior.alpha0 > 0.0) && cfg.mode != ModeSelection::ExactIF)
    throw ConfigError("the plug-in estimator needs alpha0 > 0");
  return cfg;
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
  }
}

std::vector<double> empirical_mixture_cdf(const PluginState& state,
                                          const Weights& w, const ArmLaw& q,
                                          double lo, double hi) {
  std::vector<double> out(kDiagnosticPoints, 0.0);
  const double alpha0 = state.prior().alpha0;
  for (int i = 0; i < kDiagnosticPoints; ++i) {
    const double x = lo + (hi - lo) * i / (kDiagnosticPoints - 1);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < state.num_arms(); ++k)
      acc += w(k) * regularized_cdf(state.arm(k), q, alpha0, x);
    out[i] = acc;
  }
  return out;
}

namespace {

template <typename Fn>
void parallel_for(const std::vector<std::size_t>& order, int jobs, Fn&& fn) {
  const std::size_t n_workers = std::max<std::size_t>(
      1, std::min<std::size_t>(order.size(), static_cast<std::size_t>(jobs)));
  if (n_workers == 1) {
    for (std::size_t idx : order) fn(idx);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < n_workers; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < order.size(); i = next++) {
          try {
            fn(order[i]);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

EpisodeSummary summarize(EpisodeTrace&& trace, double ustar,
                         const ExperimentConfig& cfg) {
  EpisodeSummary s;
  const RegretSummary reg = regret_accumulate(trace, ustar);
  s.gap = reg.gap_curve;
  s.regret.reserve(trace.steps.size());
  double acc = 0.0;
  for (const StepRecord& r : trace.steps) {
    acc += utility_gap(ustar, r.utility);
    s.regret.push_back(acc);
    if (r.bias_inf) {
      s.bias_t.push_back(r.t);
      s.bias_inf.push_back(*r.bias_inf);
      s.bias_se_max.push_back(r.bias_se_max.value_or(0.0));
    }
  }
  s.wbar_final = trace.wbar_final;
  s.w_final = trace.w_final;
  s.pulls = trace.pulls;
  if (cfg.utility.kind == UtilitySpec::Kind::Wasserstein && trace.final_state)
    s.empirical_cdf = empirical_mixture_cdf(*trace.final_state, trace.w_final,
                                            cfg.utility.reference_law(),
                                            cfg.scenario.lo, cfg.scenario.hi);
  return s;
}

void mean_se(const std::vector<double>& xs, double& mean, double& se) {
  const double n = static_cast<double>(xs.size());
  mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) {
    se = 0.0;
    return;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  se = std::sqrt(ss / (n - 1.0) / n);
}

ModeAggregate aggregate(ScoreMode mode, std::vector<EpisodeSummary> eps) {
  ModeAggregate agg;
  agg.mode = mode;
  agg.n = static_cast<int>(eps.size());
  const std::size_t horizon = eps.front().gap.size();
  std::vector<double> column(eps.size());

  agg.gap_mean.resize(horizon);
  agg.gap_se.resize(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t e = 0; e < eps.size(); ++e) column[e] = eps[e].gap[t];
    mean_se(column, agg.gap_mean[t], agg.gap_se[t]);
  }

  agg.bias_t = eps.front().bias_t;
  agg.bias_mean.resize(agg.bias_t.size());
  agg.bias_se.resize(agg.bias_t.size());
  for (std::size_t c = 0; c < agg.bias_t.size(); ++c) {
    for (std::size_t e = 0; e < eps.size(); ++e) column[e] = eps[e].bias_inf[c];
    mean_se(column, agg.bias_mean[c], agg.bias_se[c]);
  }

  const Eigen::Index k = eps.front().wbar_final.size();
  agg.wbar_mean.resize(k);
  agg.wbar_se.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (std::size_t e = 0; e < eps.size(); ++e) column[e] = eps[e].wbar_final(i);
    mean_se(column, agg.wbar_mean(i), agg.wbar_se(i));
  }

  for (std::size_t e = 0; e < eps.size(); ++e) column[e] = eps[e].regret.back();
  mean_se(column, agg.regret_mean, agg.regret_se);
  agg.episodes = std::move(eps);
  return agg;
}

}  // namespace

DistributionDiagnostic emit_distribution_diagnostic(const ExperimentConfig& cfg,
                                                    const UtilityModel& model,
                                                    const Weights& wstar,
                                                    const ModeAggregate& finals) {
  DistributionDiagnostic d;
  const double lo = cfg.scenario.lo, hi = cfg.scenario.hi;
  const MixtureView oracle(model.arms(), wstar);
  const MixtureView learned(model.arms(), finals.wbar_mean);
  d.x.resize(kDiagnosticPoints);
  d.cdf_oracle.resize(kDiagnosticPoints);
  d.cdf_learned.resize(kDiagnosticPoints);
  d.cdf_empirical.assign(kDiagnosticPoints, 0.0);
  for (int i = 0; i < kDiagnosticPoints; ++i) {
    const double x = lo + (hi - lo) * i / (kDiagnosticPoints - 1);
    d.x[i] = x;
    d.cdf_oracle[i] = oracle.cdf(x);
    d.cdf_learned[i] = learned.cdf(x);
  }
  for (const EpisodeSummary& e : finals.episodes)
    for (int i = 0; i < kDiagnosticPoints && i < static_cast<int>(e.empirical_cdf.size()); ++i)
      d.cdf_empirical[i] += e.empirical_cdf[i];
  for (double& v : d.cdf_empirical) v /= static_cast<double>(finals.episodes.size());
  return d;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const RunOptions& options) {
  const UtilityModel model(cfg.scenario.arms, cfg.utility, cfg.grid);
  ExperimentResult result;
  OracleOptions oo;
  oo.seed = cfg.seed;
  result.oracle = solve_offline(model, cfg.gamma, oo);
  const double ustar = result.oracle.ustar;

  std::vector<std::size_t> order(static_cast<std::size_t>(cfg.episodes));
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (options.shuffle_seed) {
    Rng shuffler(*options.shuffle_seed);
    std::shuffle(order.begin(), order.end(), shuffler);
  }
  const int jobs = cfg.jobs > 0 ? cfg.jobs
                                : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  for (ScoreMode mode : cfg.modes()) {
    const AscentConfig acfg = cfg.ascent_config(mode);
    std::vector<EpisodeSummary> eps(order.size());
    parallel_for(order, jobs, [&](std::size_t e) {
      Rng rng = substream(cfg.seed, e, kEpisodeSalt);
      Rng bias_rng = substream(cfg.seed, e, kBiasSalt);
      eps[e] = summarize(run_episode(acfg, model, ustar, rng, bias_rng), ustar, cfg);
    });
    result.modes.push_back(aggregate(mode, std::move(eps)));
  }

  if (cfg.utility.kind == UtilitySpec::Kind::Wasserstein)
    result.diagnostic = emit_distribution_diagnostic(cfg, model, result.oracle.wstar,
                                                     result.modes.back());
  if (options.write_files) write_outputs(cfg, result);
  return result;
}

std::string format_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError("cannot write '" + path.string() + "'");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw OutputError("error writing '" + path.string() + "'");
}

struct Series {
  std::string label;
  std::vector<double> x, mean, se;
};

void write_svg(const std::filesystem::path& path, const std::string& title,
               const std::vector<Series>& series) {
  constexpr double kW = 640, kH = 400, kPad = 50;
  double xmax = 1, ymin = 0, ymax = 0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.mean[i] - s.se[i]);
      ymax = std::max(ymax, s.mean[i] + s.se[i]);
    }
  if (ymax <= ymin) ymax = ymin + 1;
  auto px = [&](double x) { return kPad + (kW - 2 * kPad) * x / xmax; };
  auto py = [&](double y) { return kH - kPad - (kH - 2 * kPad) * (y - ymin) / (ymax - ymin); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  auto out = open_output(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title << "</text>\n"
      << "<line x1=\"" << kPad << "\" y1=\"" << kH - kPad << "\" x2=\"" << kW - kPad
      << "\" y2=\"" << kH - kPad << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad << "\" y2=\""
      << kH - kPad << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << kPad << "\" y=\"" << kPad - 5 << "\">" << format_float(ymax) << "</text>\n"
      << "<text x=\"" << kPad << "\" y=\"" << kH - kPad + 15 << "\">" << format_float(ymin) << "</text>\n"
      << "<text x=\"" << kW - kPad << "\" y=\"" << kH - kPad + 15 << "\" text-anchor=\"end\">"
      << format_float(xmax) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& sr = series[s];
    const char* color = colors[s % 4];
    out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < sr.x.size(); ++i)
      out << px(sr.x[i]) << ',' << py(sr.mean[i] + sr.se[i]) << ' ';
    for (std::size_t i = sr.x.size(); i-- > 0;)
      out << px(sr.x[i]) << ',' << py(sr.mean[i] - sr.se[i]) << ' ';
    out << "\"/>\n<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (std::size_t i = 0; i < sr.x.size(); ++i)
      out << px(sr.x[i]) << ',' << py(sr.mean[i]) << ' ';
    out << "\"/>\n<text x=\"" << kW - kPad - 100 << "\" y=\"" << kPad + 15 * (s + 1)
        << "\" fill=\"" << color << "\">" << sr.label << "</text>\n";
  }
  out << "</svg>\n";
  finish(out, path);
}

}  // namespace

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw OutputError("cannot create '" + dir.string() + "': " + ec.message());

  {
    const fs::path p = dir / "gap.csv";
    auto out = open_output(p);
    out << "t,mode,gap_mean,gap_se,n\n";
    for (const auto& m : result.modes)
      for (std::size_t t = 0; t < m.gap_mean.size(); ++t)
        out << t + 1 << ',' << to_string(m.mode) << ',' << format_float(m.gap_mean[t]) << ','
            << format_float(m.gap_se[t]) << ',' << m.n << '\n';
    finish(out, p);
  }
  {
    const fs::path p = dir / "bias.csv";
    auto out = open_output(p);
    out << "t,mode,bias_inf_mean,bias_inf_se,n\n";
    for (const auto& m : result.modes)
      for (std::size_t c = 0; c < m.bias_t.size(); ++c)
        out << m.bias_t[c] << ',' << to_string(m.mode) << ',' << format_float(m.bias_mean[c])
            << ',' << format_float(m.bias_se[c]) << ',' << m.n << '\n';
    finish(out, p);
  }
  {
    const fs::path p = dir / "weights.csv";
    auto out = open_output(p);
    out << "mode,k,wbar_mean,wbar_se\n";
    for (const auto& m : result.modes)
      for (Eigen::Index k = 0; k < m.wbar_mean.size(); ++k)
        out << to_string(m.mode) << ',' << k << ',' << format_float(m.wbar_mean(k)) << ','
            << format_float(m.wbar_se(k)) << '\n';
    finish(out, p);
  }
  if (result.diagnostic) {
    const fs::path p = dir / "diag.csv";
    auto out = open_output(p);
    out << "x,cdf_oracle_mixture,cdf_learned_mixture,cdf_empirical_mixture\n";
    const auto& d = *result.diagnostic;
    for (std::size_t i = 0; i < d.x.size(); ++i)
      out << format_float(d.x[i]) << ',' << format_float(d.cdf_oracle[i]) << ','
          << format_float(d.cdf_learned[i]) << ',' << format_float(d.cdf_empirical[i]) << '\n';
    finish(out, p);
  }
  {
    json j;
    j["config"] = cfg.to_json();
    j["oracle"] = {
        {"wstar", std::vector<double>(result.oracle.wstar.data(),
                                      result.oracle.wstar.data() + result.oracle.wstar.size())},
        {"ustar", result.oracle.ustar},
        {"certificate", result.oracle.certificate},
        {"method", to_string(result.oracle.method)},
        {"iterations", result.oracle.iterations},
        {"converged", result.oracle.converged}};
    for (const auto& m : result.modes) {
      std::vector<double> mean_pulls(m.wbar_mean.size(), 0.0);
      for (const auto& e : m.episodes)
        for (std::size_t k = 0; k < e.pulls.size(); ++k)
          mean_pulls[k] += static_cast<double>(e.pulls[k]) / m.n;
      j["modes"][to_string(m.mode)] = {
          {"episodes", m.n},
          {"final_gap_mean", m.gap_mean.back()},
          {"final_gap_se", m.gap_se.back()},
          {"regret_mean", m.regret_mean},
          {"regret_se", m.regret_se},
          {"wbar_mean", std::vector<double>(m.wbar_mean.data(),
                                            m.wbar_mean.data() + m.wbar_mean.size())},
          {"pulls_mean", mean_pulls}};
    }
    const fs::path p = dir / "summary.json";
    auto out = open_output(p);
    out << j.dump(2) << '\n';
    finish(out, p);
  }
  if (cfg.plots) {
    std::vector<Series> gaps, biases;
    for (const auto& m : result.modes) {
      Series g{to_string(m.mode), {}, m.gap_mean, m.gap_se};
      for (std::size_t t = 0; t < m.gap_mean.size(); ++t) g.x.push_back(static_cast<double>(t + 1));
      gaps.push_back(std::move(g));
      Series b{to_string(m.mode), {}, m.bias_mean, m.bias_se};
      for (int t : m.bias_t) b.x.push_back(t);
      biases.push_back(std::move(b));
    }
    write_svg(dir / "gap.svg", "utility gap U* - U(wbar_t)", gaps);
    if (!result.modes.empty() && !result.modes.front().bias_t.empty())
      write_svg(dir / "bias.svg", "bias diagnostic |B_t|_inf", biases);
  }
}

}  // namespace distbandit
