#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/internal.hpp"
#include "cpppkit/cli.hpp"
#include "cpppkit/errors.hpp"
#include "cpppkit/mcmc.hpp"
#include "cpppkit/scenario.hpp"

namespace cpppkit {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string_view> kCommon{"model", "data", "seed", "workers", "backend", "out", "discrepancy"};
const std::vector<std::string_view> kChain{"m", "burn_in", "mixing", "bad_mixing_factor"};
const std::vector<std::string_view> kPlan{"r",         "m_tilde",    "c",      "policy", "ess_target",
                                          "ess_max",   "thinning",   "tau_buffer", "methods", "b",
                                          "block_length", "level",   "threshold"};

std::vector<std::string_view> join(std::initializer_list<const std::vector<std::string_view>*> parts,
                                   std::initializer_list<std::string_view> extra = {}) {
  std::vector<std::string_view> out;
  for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

/// Outputs are rendered in memory and written only once the command succeeds.
class Outputs {
public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}
  std::ostringstream& file(const std::string& name) { return files_[name]; }
  void commit() {
    fs::create_directories(dir_);
    for (const auto& [name, buffer] : files_) {
      std::ofstream out(dir_ / name, std::ios::binary);
      if (!out) throw ParseError("cannot write " + (dir_ / name).string(), 0);
      out << buffer.str();
    }
  }

private:
  fs::path dir_;
  std::map<std::string, std::ostringstream> files_;
};

VarianceMethod method_named(const std::string& name) {
  if (name == "plugin") return VarianceMethod::plugin;
  if (name == "mbb") return VarianceMethod::bootstrap_mbb;
  if (name == "normal") return VarianceMethod::bootstrap_normal;
  throw UsageError("unknown ci_method '" + name + "'");
}

RuntimeInfo runtime_of(const RunConfig& config, double seconds, double real_seconds) {
  const auto exec = config.execution();
  return {seconds, real_seconds, exec.workers, exec.backend == Backend::openmp ? "openmp" : "serial"};
}

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(4) << x;
  return s.str();
}

}  // namespace

std::vector<VarianceEstimate> estimate_uncertainty(const CpppEstimate& est, const UncertaintyRequest& request) {
  const TransferTable table(DeltaSeries(est.real_deltas, DeltaSource::real_data), est.plan.tau_buffer);
  std::vector<VarianceEstimate> out;
  for (auto method : request.methods) {
    switch (method) {
      case VarianceMethod::plugin:
        out.push_back(plugin_variance(est.replicates, est.ppp_y, table, request.level));
        break;
      case VarianceMethod::bootstrap_mbb:
        out.push_back(bootstrap_mbb(est.replicates, est.ppp_y, request.b, request.block_length, est.plan.master_seed,
                                    est.plan.execution, request.level));
        break;
      case VarianceMethod::bootstrap_normal:
        out.push_back(bootstrap_normal(est.replicates, est.ppp_y, request.b, est.plan.master_seed, est.plan.execution,
                                       request.level));
        break;
    }
  }
  return out;
}

std::string verdict(const std::array<double, 2>& ci, double threshold) {
  if (ci[0] > threshold) return "no evidence against model";
  if (ci[1] < threshold) return "reject model";
  return "inconclusive";
}

std::vector<RepeatRow> run_repeats(const Model& model, const Dataset& data, const RealChainConfig& real,
                                   const CalibrationPlan& plan, const UncertaintyRequest& request, std::size_t n,
                                   VarianceMethod ci_method, std::optional<double> reference, bool same_seed) {
  if (n < 2) throw DomainError("repeat needs n_repeats >= 2");
  UncertaintyRequest req = request;
  if (std::find(req.methods.begin(), req.methods.end(), ci_method) == req.methods.end())
    req.methods.push_back(ci_method);

  std::vector<RepeatRow> rows;
  rows.reserve(n);
  for (std::size_t run = 0; run < n; ++run) {
    CalibrationPlan p = plan;
    p.master_seed = same_seed ? plan.master_seed : derive_seed(plan.master_seed, run);
    const auto est = orchestrate(model, data, real, p);
    const auto unc = estimate_uncertainty(est, req);
    RepeatRow row;
    row.run = run;
    row.seed = p.master_seed;
    row.cppp = est.value;
    for (const auto& v : unc) {
      if (v.method == VarianceMethod::plugin) row.se_plugin = v.se;
      if (v.method == VarianceMethod::bootstrap_mbb) row.se_mbb = v.se;
      if (v.method == VarianceMethod::bootstrap_normal) row.se_normal = v.se;
      if (v.method == ci_method) row.ci = v.ci;
    }
    if (reference) row.covers = row.ci[0] <= *reference && *reference <= row.ci[1];
    rows.push_back(row);
  }
  return rows;
}

RepeatSummary summarize_repeats(const std::vector<RepeatRow>& rows) {
  RepeatSummary s;
  s.n = rows.size();
  if (rows.empty()) return s;
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) s.mean += r.cppp;
  s.mean /= n;
  double ss = 0.0;
  for (const auto& r : rows) ss += (r.cppp - s.mean) * (r.cppp - s.mean);
  s.sd = rows.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;

  auto average = [&](auto member) -> std::optional<double> {
    double total = 0.0;
    for (const auto& r : rows) {
      if (!(r.*member)) return std::nullopt;
      total += *(r.*member);
    }
    return total / n;
  };
  s.mean_se_plugin = average(&RepeatRow::se_plugin);
  s.mean_se_mbb = average(&RepeatRow::se_mbb);
  s.mean_se_normal = average(&RepeatRow::se_normal);
  if (rows.front().covers) {
    double hits = 0.0;
    for (const auto& r : rows) hits += r.covers.value_or(false) ? 1.0 : 0.0;
    s.coverage = hits / n;
  }
  return s;
}

void write_repeat_csv(std::ostream& out, const std::vector<RepeatRow>& rows) {
  out << "run,cppp_hat,se_plugin,se_mbb,se_normal,ci_lo,ci_hi,covers\n";
  out.precision(17);
  auto opt = [&out](const std::optional<double>& v) {
    if (v) out << *v;
  };
  for (const auto& r : rows) {
    out << r.run << ',' << r.cppp << ',';
    opt(r.se_plugin);
    out << ',';
    opt(r.se_mbb);
    out << ',';
    opt(r.se_normal);
    out << ',' << r.ci[0] << ',' << r.ci[1] << ',';
    if (r.covers) out << (*r.covers ? 1 : 0);
    out << '\n';
  }
}

int cmd_ppp(const RunConfig& config, std::ostream& out) {
  config.check_keys(join({&kCommon, &kChain}, {"chain_dump"}));
  const auto loaded = load_model(config);
  const auto real = real_chain_config(config);
  const auto start = std::chrono::steady_clock::now();
  const auto run = run_real_chain(*loaded.model, *loaded.data, real, config.seed());
  const double seconds = seconds_since(start);

  Outputs files(config.output_dir());
  write_ppp_json(files.file("ppp.json"), run.ppp, config.echo(), runtime_of(config, seconds, seconds));
  if (config.has("chain_dump"))
    write_chain_csv(files.file(config.text("chain_dump")), run.chain, loaded.model->parameter_names());
  files.commit();

  out << "ppp_hat=" << fmt(run.ppp.value) << " k=" << run.ppp.k << " m=" << run.ppp.m << " ess=" << fmt(run.ppp.ess)
      << " acceptance=" << fmt(run.chain.acceptance_rate) << " seconds=" << fmt(seconds) << '\n';
  return 0;
}

int cmd_cppp(const RunConfig& config, std::ostream& out) {
  config.check_keys(join({&kCommon, &kChain, &kPlan}));
  const auto loaded = load_model(config);
  const auto real = real_chain_config(config);
  const auto plan = calibration_plan(config);
  const auto request = uncertainty_request(config);
  const double threshold = config.real("threshold", 0.05);
  if (real.m < plan.r) throw UsageError("m must be >= r");

  const auto est = orchestrate(*loaded.model, *loaded.data, real, plan);
  const auto unc = estimate_uncertainty(est, request);

  Outputs files(config.output_dir());
  write_cppp_json(files.file("cppp.json"), est, unc, config.echo(), runtime_of(config, est.seconds, est.real_seconds));
  write_replicate_csv(files.file("replicate.csv"), est.replicates);
  files.commit();

  out << "ppp_y=" << fmt(est.ppp_y) << " cppp=" << fmt(est.value) << " r=" << est.r << '\n';
  for (const auto& v : unc)
    out << "  " << to_string(v.method) << ": se=" << fmt(v.se) << " ci=[" << fmt(v.ci[0]) << ", " << fmt(v.ci[1])
        << "]\n";
  if (!unc.empty()) out << "verdict (" << to_string(unc.front().method) << ", threshold " << threshold
                        << "): " << verdict(unc.front().ci, threshold) << '\n';
  return 0;
}

int cmd_scenario(const RunConfig& config, std::ostream& out) {
  config.check_keys({"a", "b", "cppp", "c", "grid", "simulate", "fixed_m", "r_values", "seed", "workers", "backend",
                     "out"});
  ScenarioSpec spec;
  spec.null_shape = {config.real("a", 2.0), config.real("b", 2.0)};
  spec.cppp_true = config.real("cppp", 0.2);
  spec.budget = config.integer("c", 20000);
  if (config.has("grid")) spec.m_grid = parse_int_list("grid", config.text("grid"));
  try {
    validate_scenario(spec);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  const auto exec = config.execution();

  Outputs files(config.output_dir());
  const auto rows = scenario_grid(spec, exec);
  write_scenario_csv(files.file("scenario.csv"), rows);
  for (const auto& row : rows)
    if (spec.budget % row.m_tilde != 0)
      out << "note: c=" << spec.budget << " is not a multiple of m_tilde=" << row.m_tilde << "; r floored to " << row.r
          << '\n';

  const auto n_outer = config.integer("simulate", 0);
  if (n_outer != 0) {
    if (n_outer < 100) throw UsageError("simulate needs n_outer >= 100");
    auto& check = files.file("scenario_check.csv");
    check << "m_tilde,r,bias,variance,sim_bias,sim_bias_se,sim_variance,sim_variance_se,bias_z,variance_z\n";
    check.precision(12);
    for (const auto& row : rows) {
      const auto sim = scenario_simulate(spec, row.m_tilde, row.r, static_cast<std::size_t>(n_outer), config.seed(), exec);
      const double var = row.se * row.se;
      check << row.m_tilde << ',' << row.r << ',' << row.bias << ',' << var << ',' << sim.empirical_bias << ','
            << sim.se_bias << ',' << sim.empirical_variance << ',' << sim.se_variance << ','
            << (sim.empirical_bias - row.bias) / sim.se_bias << ',' << (sim.empirical_variance - var) / sim.se_variance
            << '\n';
    }
  }

  if (config.has("fixed_m")) {
    const auto m = config.integer("fixed_m", 100);
    const auto r_values = parse_int_list("r_values", config.text("r_values", "10,20,50,100,200,500,1000"));
    for (auto r : r_values)
      if (r < 1) throw UsageError("r_values must be positive");
    if (m < 1) throw UsageError("fixed_m must be positive");
    write_fixed_m_csv(files.file("scenario_fixed_m.csv"), scenario_fixed_m(spec, m, r_values));
  }
  files.commit();

  out << "ppp_y=" << fmt(scenario_ppp_y(spec)) << '\n';
  for (const auto& row : rows)
    out << "  m_tilde=" << row.m_tilde << " r=" << row.r << " |bias|=" << fmt(row.abs_bias) << " se=" << fmt(row.se)
        << " rmse=" << fmt(row.rmse) << '\n';
  return 0;
}

int cmd_repeat(const RunConfig& config, std::ostream& out) {
  config.check_keys(join({&kCommon, &kChain, &kPlan}, {"n_repeats", "reference", "same_seed", "ci_method"}));
  const auto n = config.integer("n_repeats", 0);
  if (n < 2) throw UsageError("repeat needs n_repeats >= 2");
  const auto loaded = load_model(config);
  const auto real = real_chain_config(config);
  const auto plan = calibration_plan(config);
  const auto request = uncertainty_request(config);
  if (real.m < plan.r) throw UsageError("m must be >= r");
  std::optional<double> reference;
  if (config.has("reference")) reference = config.real("reference", 0.0);
  const auto ci_method = method_named(config.text("ci_method", "plugin"));

  const auto start = std::chrono::steady_clock::now();
  const auto rows = run_repeats(*loaded.model, *loaded.data, real, plan, request, static_cast<std::size_t>(n),
                                ci_method, reference, config.integer("same_seed", 0) != 0);
  const auto summary = summarize_repeats(rows);
  const double seconds = seconds_since(start);

  Outputs files(config.output_dir());
  write_repeat_csv(files.file("repeat_summary.csv"), rows);
  nlohmann::ordered_json doc;
  doc["n"] = summary.n;
  doc["mean"] = summary.mean;
  doc["sd"] = summary.sd;
  auto put = [&doc](const char* key, const std::optional<double>& v) {
    doc[key] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  put("mean_se_plugin", summary.mean_se_plugin);
  put("mean_se_mbb", summary.mean_se_mbb);
  put("mean_se_normal", summary.mean_se_normal);
  put("coverage", summary.coverage);
  put("reference", reference);
  doc["ci_method"] = std::string(to_string(ci_method));
  doc["config"] = config.echo();
  doc["runtime"] = {{"seconds", seconds}, {"workers", plan.execution.workers}};
  files.file("repeat_stats.json") << doc.dump(2) << '\n';
  files.commit();

  out << "runs=" << summary.n << " mean=" << fmt(summary.mean) << " sd=" << fmt(summary.sd);
  if (summary.mean_se_plugin) out << " se_plugin=" << fmt(*summary.mean_se_plugin);
  if (summary.mean_se_mbb) out << " se_mbb=" << fmt(*summary.mean_se_mbb);
  if (summary.mean_se_normal) out << " se_normal=" << fmt(*summary.mean_se_normal);
  if (summary.coverage) out << " coverage=" << fmt(*summary.coverage);
  out << '\n';
  return 0;
}

int cmd_report(const RunConfig& config, std::ostream& out) {
  config.check_keys({"in", "bins", "out"});
  const auto inputs = parse_text_list(config.text("in", "."));
  if (inputs.empty()) throw UsageError("report needs in=<result dir>[,<result dir>...]");
  const auto bins = config.integer("bins", 20);
  if (bins < 1) throw UsageError("bins must be >= 1");

  std::vector<CpppSummary> summaries;
  Outputs files(config.output_dir());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const fs::path dir = inputs[i];
    if (!fs::is_regular_file(dir / "cppp.json")) throw ParseError("no cppp.json in " + dir.string(), 0);
    if (!fs::is_regular_file(dir / "replicate.csv")) throw ParseError("no replicate.csv in " + dir.string(), 0);
    auto summary = read_cppp_json(dir / "cppp.json");
    const auto rows = read_replicate_csv(dir / "replicate.csv");
    std::vector<double> ppps;
    ppps.reserve(rows.size());
    for (const auto& r : rows) ppps.push_back(r.ppp_hat);
    const auto name = inputs.size() == 1 ? std::string("histogram.csv") : "histogram_" + std::to_string(i) + ".csv";
    write_histogram_csv(files.file(name), histogram(ppps, static_cast<std::size_t>(bins)), summary.ppp_y);
    summaries.push_back(std::move(summary));
  }
  write_errorbar_csv(files.file("errorbar.csv"), summaries);
  files.commit();
  out << "report: " << summaries.size() << " result set(s) written to " << config.output_dir().string() << '\n';
  return 0;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Calibrated posterior predictive p-values"};
  std::string command;
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::vector<std::string> overrides;
  app.add_option("command", command, "ppp | cppp | scenario | repeat | report")
      ->required()
      ->check(CLI::IsMember({"ppp", "cppp", "scenario", "repeat", "report"}));
  app.add_option("--config", config_file, "key=value configuration file");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--workers", workers, "worker threads");
  app.add_option("overrides", overrides, "key=value settings");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return 2;
  }

  try {
    RunConfig config = config_file.empty() ? RunConfig() : RunConfig::from_file(config_file);
    for (const auto& token : overrides) config.assign(token);
    if (seed) config.set("seed", std::to_string(*seed));
    if (workers) config.set("workers", std::to_string(*workers));

    if (command == "ppp") return cmd_ppp(config, out);
    if (command == "cppp") return cmd_cppp(config, out);
    if (command == "scenario") return cmd_scenario(config, out);
    if (command == "repeat") return cmd_repeat(config, out);
    return cmd_report(config, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace cpppkit
