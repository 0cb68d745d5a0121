#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cpppkit/calibration.hpp"
#include "cpppkit/model.hpp"
#include "cpppkit/results.hpp"
#include "cpppkit/uncertainty.hpp"

namespace cpppkit {

/// Bad command line or configuration; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// key=value settings from a config file, then command-line overrides.
class RunConfig {
public:
  RunConfig() = default;

  /// `key = value` lines; `#` starts a comment.
  static RunConfig from_file(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  /// Parses one `key=value` token.
  void assign(std::string_view token);

  [[nodiscard]] bool has(const std::string& key) const { return values_.contains(key); }
  [[nodiscard]] std::string text(const std::string& key, const std::string& fallback = "") const;
  [[nodiscard]] double real(const std::string& key, double fallback) const;
  [[nodiscard]] std::int64_t integer(const std::string& key, std::int64_t fallback) const;
  [[nodiscard]] std::uint64_t seed() const;
  [[nodiscard]] Execution execution() const;
  [[nodiscard]] std::filesystem::path output_dir() const;

  /// Throws UsageError naming the first key not in `known`.
  void check_keys(const std::vector<std::string_view>& known) const;

  /// Everything except where and how it ran (out, workers, backend).
  [[nodiscard]] ConfigEcho echo() const;

  [[nodiscard]] const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
  std::map<std::string, std::string> values_;
};

struct LoadedModel {
  std::unique_ptr<Model> model;
  std::optional<Dataset> data;
};

/// Reads `model` (newcomb | simulated_tt | dipper_cc | dipper_tt | cjs_cc | cjs_tt)
/// and `data`; the bundled examples have default data paths.
LoadedModel load_model(const RunConfig& config);

RealChainConfig real_chain_config(const RunConfig& config);
CalibrationPlan calibration_plan(const RunConfig& config);

struct UncertaintyRequest {
  std::vector<VarianceMethod> methods{VarianceMethod::plugin, VarianceMethod::bootstrap_mbb,
                                      VarianceMethod::bootstrap_normal};
  std::size_t b = 200;
  std::size_t block_length = 0;
  double level = 0.95;
};

UncertaintyRequest uncertainty_request(const RunConfig& config);

/// Runs the requested estimators on a finished calibration. Bootstrap rounds
/// draw from the plan's master seed.
std::vector<VarianceEstimate> estimate_uncertainty(const CpppEstimate& est, const UncertaintyRequest& request);

/// "no evidence against model", "reject model" or "inconclusive".
std::string verdict(const std::array<double, 2>& ci, double threshold);

struct RepeatRow {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  double cppp = 0.0;
  std::optional<double> se_plugin, se_mbb, se_normal;
  std::array<double, 2> ci{0.0, 0.0};
  std::optional<bool> covers;
};

struct RepeatSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // run-to-run SD of cppp_hat
  std::optional<double> mean_se_plugin, mean_se_mbb, mean_se_normal;
  std::optional<double> coverage;
};

/// Reruns orchestrate n times with derive_seed(master, run) seeds (or the
/// master seed every time when `same_seed`). The CI comes from `ci_method`.
std::vector<RepeatRow> run_repeats(const Model& model, const Dataset& data, const RealChainConfig& real,
                                   const CalibrationPlan& plan, const UncertaintyRequest& request, std::size_t n,
                                   VarianceMethod ci_method, std::optional<double> reference, bool same_seed = false);

RepeatSummary summarize_repeats(const std::vector<RepeatRow>& rows);

/// `run,cppp_hat,se_plugin,se_mbb,se_normal,ci_lo,ci_hi,covers`
void write_repeat_csv(std::ostream& out, const std::vector<RepeatRow>& rows);

int cmd_ppp(const RunConfig& config, std::ostream& out);
int cmd_cppp(const RunConfig& config, std::ostream& out);
int cmd_scenario(const RunConfig& config, std::ostream& out);
int cmd_repeat(const RunConfig& config, std::ostream& out);
int cmd_report(const RunConfig& config, std::ostream& out);

/// Full command line, including argv[0]. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cpppkit
