#include <algorithm>
#include <charconv>
#include <fstream>

#include "cli/internal.hpp"
#include "cpppkit/cli.hpp"
#include "cpppkit/errors.hpp"
#include "cpppkit/io.hpp"
#include "cpppkit/models/cjs.hpp"
#include "cpppkit/models/newcomb.hpp"

#ifndef CPPPKIT_DATA_DIR
#define CPPPKIT_DATA_DIR "data"
#endif

namespace cpppkit {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw UsageError("bad value for " + key + ": '" + value + "'");
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    auto item = trim(std::string_view(s).substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config " + path.string(), 0);
  RunConfig cfg;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    const auto body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value", number);
    const auto key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw ParseError("empty key", number);
    cfg.set(key, trim(std::string_view(body).substr(eq + 1)));
  }
  return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) { values_[key] = value; }

void RunConfig::assign(std::string_view token) {
  const auto eq = token.find('=');
  if (eq == std::string_view::npos || eq == 0) throw UsageError("expected key=value, got '" + std::string(token) + "'");
  set(trim(token.substr(0, eq)), trim(token.substr(eq + 1)));
}

std::string RunConfig::text(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double RunConfig::real(const std::string& key, double fallback) const {
  return has(key) ? parse_number<double>(key, values_.at(key)) : fallback;
}

std::int64_t RunConfig::integer(const std::string& key, std::int64_t fallback) const {
  return has(key) ? parse_number<std::int64_t>(key, values_.at(key)) : fallback;
}

std::uint64_t RunConfig::seed() const { return has("seed") ? parse_number<std::uint64_t>("seed", values_.at("seed")) : 1; }

Execution RunConfig::execution() const {
  Execution exec;
  const auto workers = integer("workers", 1);
  if (workers < 1 || workers > 1024) throw UsageError("workers must lie in [1, 1024]");
  exec.workers = static_cast<int>(workers);
  const auto backend = text("backend", "openmp");
  if (backend == "openmp")
    exec.backend = Backend::openmp;
  else if (backend == "serial")
    exec.backend = Backend::serial;
  else
    throw UsageError("backend must be openmp or serial");
  return exec;
}

std::filesystem::path RunConfig::output_dir() const { return text("out", "."); }

void RunConfig::check_keys(const std::vector<std::string_view>& known) const {
  for (const auto& [key, value] : values_)
    if (std::find(known.begin(), known.end(), key) == known.end()) throw UsageError("unknown key '" + key + "'");
}

ConfigEcho RunConfig::echo() const {
  ConfigEcho out;
  for (const auto& [key, value] : values_)
    if (key != "out" && key != "workers" && key != "backend") out[key] = value;
  return out;
}

LoadedModel load_model(const RunConfig& config) {
  const auto id = config.text("model", "newcomb");
  const std::filesystem::path data_dir = CPPPKIT_DATA_DIR;
  LoadedModel out;
  if (id == "newcomb") {
    const auto disc = config.text("discrepancy", "order");
    if (disc != "order" && disc != "chi2") throw UsageError("discrepancy must be order or chi2");
    out.model = std::make_unique<NewcombModel>(disc == "order" ? NewcombDiscrepancy::order_statistic
                                                               : NewcombDiscrepancy::chi2);
    out.data.emplace(load_real_vector(config.text("data", (data_dir / "newcomb.txt").string())));
    return out;
  }

  CjsVariant variant;
  std::string fallback;
  if (id == "simulated_tt") {
    variant = CjsVariant::time_dependent;
    fallback = (data_dir / "simulated_tt.txt").string();
  } else if (id == "dipper_cc" || id == "cjs_cc") {
    variant = CjsVariant::constant;
  } else if (id == "dipper_tt" || id == "cjs_tt") {
    variant = CjsVariant::time_dependent;
  } else {
    throw UsageError("unknown model '" + id + "'");
  }
  if (config.has("discrepancy")) throw UsageError("capture-recapture models use the Freeman-Tukey discrepancy");
  const auto path = config.text("data", fallback);
  if (path.empty()) throw UsageError("model " + id + " needs data=<capture history file>");
  auto histories = load_capture_histories(path);
  out.model = std::make_unique<CjsModel>(variant, histories.occasions());
  out.data.emplace(std::move(histories));
  return out;
}

RealChainConfig real_chain_config(const RunConfig& config) {
  RealChainConfig real;
  const auto m_tilde = config.integer("m_tilde", 100);
  const auto target = config.real("ess_target", 100.0);
  const bool ess = config.text("policy", config.has("m_tilde") || !config.has("ess_target") ? "fixed" : "ess") == "ess";
  const double scale = ess ? target : static_cast<double>(m_tilde);
  const auto fallback = std::max<std::int64_t>(1000, static_cast<std::int64_t>(10.0 * scale));
  const auto m = config.integer("m", fallback);
  const auto burn = config.integer("burn_in", 1000);
  if (m < 10) throw UsageError("m must be >= 10");
  if (burn < 0) throw UsageError("burn_in must be >= 0");
  real.m = static_cast<std::size_t>(m);
  real.burn_in = static_cast<std::size_t>(burn);
  const auto mixing = config.text("mixing", "good");
  if (mixing == "good")
    real.mixing = Mixing::good;
  else if (mixing == "bad")
    real.mixing = Mixing::bad;
  else
    throw UsageError("mixing must be good or bad");
  real.bad_mixing_factor = config.real("bad_mixing_factor", real.bad_mixing_factor);
  return real;
}

CalibrationPlan calibration_plan(const RunConfig& config) {
  CalibrationPlan plan;
  plan.master_seed = config.seed();
  plan.execution = config.execution();
  plan.tau_buffer = config.real("tau_buffer", 1.0);

  const auto policy = config.text("policy", config.has("m_tilde") || !config.has("ess_target") ? "fixed" : "ess");
  std::int64_t m_tilde = config.integer("m_tilde", 100);
  if (policy == "fixed") {
    if (m_tilde < 10) throw UsageError("m_tilde must be >= 10");
    plan.policy = FixedLength{static_cast<std::size_t>(m_tilde)};
  } else if (policy == "ess") {
    const auto cap = config.integer("ess_max", 0);
    if (cap < 0) throw UsageError("ess_max must be >= 0");
    plan.policy = EssTarget{config.real("ess_target", 100.0), static_cast<std::size_t>(cap)};
  } else {
    throw UsageError("policy must be fixed or ess");
  }

  std::int64_t r = config.integer("r", 100);
  if (config.has("c")) {
    const auto c = config.integer("c", 0);
    if (policy != "fixed") throw UsageError("budget c needs the fixed policy");
    if (c < m_tilde) throw UsageError("budget c must be >= m_tilde");
    const auto implied = c / m_tilde;
    if (config.has("r") && r != implied)
      throw UsageError("r=" + std::to_string(r) + " is inconsistent with c/m_tilde=" + std::to_string(implied));
    r = implied;
  }
  if (r < 2) throw UsageError("r must be >= 2");
  plan.r = static_cast<std::size_t>(r);

  const auto thinning = config.text("thinning", "systematic");
  if (thinning == "systematic")
    plan.thinning = Thinning::systematic;
  else if (thinning == "random")
    plan.thinning = Thinning::random;
  else
    throw UsageError("thinning must be systematic or random");
  try {
    validate_plan(plan);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  return plan;
}

UncertaintyRequest uncertainty_request(const RunConfig& config) {
  UncertaintyRequest req;
  if (config.has("methods")) {
    req.methods.clear();
    for (const auto& name : split_list(config.text("methods"))) {
      if (name == "plugin")
        req.methods.push_back(VarianceMethod::plugin);
      else if (name == "mbb")
        req.methods.push_back(VarianceMethod::bootstrap_mbb);
      else if (name == "normal")
        req.methods.push_back(VarianceMethod::bootstrap_normal);
      else
        throw UsageError("unknown uncertainty method '" + name + "' (plugin, mbb, normal)");
    }
  }
  const auto b = config.integer("b", 200);
  const auto block = config.integer("block_length", 0);
  if (b < 2) throw UsageError("b must be >= 2");
  if (block < 0) throw UsageError("block_length must be >= 0");
  req.b = static_cast<std::size_t>(b);
  req.block_length = static_cast<std::size_t>(block);
  req.level = config.real("level", 0.95);
  if (!(req.level > 0.0 && req.level < 1.0)) throw UsageError("level must lie in (0, 1)");
  return req;
}

std::vector<std::int64_t> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<std::int64_t> out;
  for (const auto& item : split_list(value)) out.push_back(parse_number<std::int64_t>(key, item));
  if (out.empty()) throw UsageError(key + " must list at least one value");
  return out;
}

std::vector<std::string> parse_text_list(const std::string& value) { return split_list(value); }

}  // namespace cpppkit
