#include "cpppkit/results.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cpppkit/errors.hpp"

namespace cpppkit {

namespace {

using nlohmann::ordered_json;

ordered_json config_json(const ConfigEcho& config) {
  ordered_json out = ordered_json::object();
  for (const auto& [k, v] : config) out[k] = v;
  return out;
}

ordered_json runtime_json(const RuntimeInfo& runtime) {
  return {{"seconds", runtime.seconds},
          {"real_seconds", runtime.real_seconds},
          {"workers", runtime.workers},
          {"backend", runtime.backend}};
}

ordered_json policy_json(const ChainLengthPolicy& policy) {
  if (const auto* fixed = std::get_if<FixedLength>(&policy)) return {{"type", "fixed"}, {"m_tilde", fixed->m_tilde}};
  const auto& ess = std::get<EssTarget>(policy);
  return {{"type", "ess"}, {"target", ess.target}, {"max_iterations", ess.max_iterations}};
}

VarianceMethod method_from_string(const std::string& s) {
  for (auto m : {VarianceMethod::plugin, VarianceMethod::bootstrap_mbb, VarianceMethod::bootstrap_normal})
    if (to_string(m) == s) return m;
  throw ParseError("unknown uncertainty method " + s, 0);
}

}  // namespace

void write_ppp_json(std::ostream& out, const PppEstimate& ppp, const ConfigEcho& config, const RuntimeInfo& runtime) {
  ordered_json doc;
  doc["ppp_hat"] = ppp.value;
  doc["k"] = ppp.k;
  doc["m"] = ppp.m;
  doc["ess"] = ppp.ess;
  doc["tau"] = ppp.tau;
  doc["config"] = config_json(config);
  doc["runtime"] = runtime_json(runtime);
  out << doc.dump(2) << '\n';
}

void write_cppp_json(std::ostream& out, const CpppEstimate& est, std::span<const VarianceEstimate> uncertainty,
                     const ConfigEcho& config, const RuntimeInfo& runtime) {
  ordered_json doc;
  doc["ppp_y"] = est.ppp_y;
  doc["cppp"] = est.value;
  doc["r"] = est.r;
  doc["policy"] = policy_json(est.plan.policy);
  doc["thinning"] = est.plan.thinning == Thinning::systematic ? "systematic" : "random";
  doc["master_seed"] = est.plan.master_seed;
  doc["real_chain"] = {{"m", est.real_config.m},
                       {"burn_in", est.real_config.burn_in},
                       {"mixing", est.real_config.mixing == Mixing::good ? "good" : "bad"},
                       {"k", est.real_ppp.k},
                       {"ess", est.real_ppp.ess},
                       {"tau", est.real_ppp.tau},
                       {"acceptance_rate", est.real_acceptance_rate},
                       {"replicate_scales", est.replicate_scales}};
  auto& reps = doc["replicates"] = ordered_json::array();
  for (const auto& r : est.replicates)
    reps.push_back({{"j", r.j},
                    {"m_tilde", r.m_tilde},
                    {"k_tilde", r.k_tilde},
                    {"ppp_hat", r.ppp_hat},
                    {"tau_hat", r.tau_hat},
                    {"ess_hat", r.ess_hat},
                    {"ess_short", r.ess_short},
                    {"seed", est.plan.master_seed},
                    {"stream", r.stream_id}});
  auto& unc = doc["uncertainty"] = ordered_json::array();
  for (const auto& v : uncertainty) {
    ordered_json params = {{"level", v.ci_level}};
    if (v.method != VarianceMethod::plugin) params["b"] = v.b;
    if (v.method == VarianceMethod::bootstrap_mbb) params["block_length"] = v.block_length;
    unc.push_back({{"method", std::string(to_string(v.method))},
                   {"variance", v.variance},
                   {"se", v.se},
                   {"ci", {v.ci[0], v.ci[1]}},
                   {"params", params}});
  }
  doc["config"] = config_json(config);
  doc["runtime"] = runtime_json(runtime);
  out << doc.dump(2) << '\n';
}

void write_replicate_csv(std::ostream& out, std::span<const ReplicateResult> replicates) {
  out << "j,m_tilde,k_tilde,ppp_hat,tau_hat,ess_hat\n";
  out.precision(17);
  for (const auto& r : replicates)
    out << r.j << ',' << r.m_tilde << ',' << r.k_tilde << ',' << r.ppp_hat << ',' << r.tau_hat << ',' << r.ess_hat
        << '\n';
}

std::vector<ReplicateRow> read_replicate_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  std::string line;
  std::getline(in, line);
  if (line != "j,m_tilde,k_tilde,ppp_hat,tau_hat,ess_hat") throw ParseError("unexpected replicate.csv header", 1);
  std::vector<ReplicateRow> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    ReplicateRow row;
    if (!(fields >> row.j >> row.m_tilde >> row.k_tilde >> row.ppp_hat >> row.tau_hat >> row.ess_hat))
      throw ParseError("malformed replicate row", number);
    rows.push_back(row);
  }
  return rows;
}

CpppSummary read_cppp_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
    CpppSummary s;
    s.ppp_y = doc.at("ppp_y").get<double>();
    s.cppp = doc.at("cppp").get<double>();
    s.r = doc.at("r").get<std::size_t>();
    const auto& policy = doc.at("policy");
    s.label = policy.at("type") == "fixed" ? "r=" + std::to_string(s.r) + " m=" + policy.at("m_tilde").dump()
                                           : "r=" + std::to_string(s.r) + " ess=" + policy.at("target").dump();
    for (const auto& u : doc.at("uncertainty")) {
      VarianceEstimate v;
      v.method = method_from_string(u.at("method").get<std::string>());
      v.variance = u.at("variance").get<double>();
      v.se = u.at("se").get<double>();
      v.ci = {u.at("ci").at(0).get<double>(), u.at("ci").at(1).get<double>()};
      v.ci_level = u.at("params").at("level").get<double>();
      s.uncertainty.push_back(v);
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw DomainError("histogram needs at least one bin");
  std::vector<HistogramBin> out(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    out[i].lo = static_cast<double>(i) / static_cast<double>(bins);
    out[i].hi = static_cast<double>(i + 1) / static_cast<double>(bins);
  }
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("histogram values must lie in [0, 1]");
    const auto i = std::min(bins - 1, static_cast<std::size_t>(v * static_cast<double>(bins)));
    ++out[i].count;
  }
  return out;
}

void write_histogram_csv(std::ostream& out, std::span<const HistogramBin> bins, double ppp_y) {
  out << "bin_lo,bin_hi,count,ppp_y\n";
  out.precision(12);
  for (const auto& b : bins) out << b.lo << ',' << b.hi << ',' << b.count << ',' << ppp_y << '\n';
}

void write_errorbar_csv(std::ostream& out, std::span<const CpppSummary> results) {
  out << "label,method,cppp,se,lo,hi\n";
  out.precision(12);
  for (const auto& r : results)
    for (const auto& v : r.uncertainty)
      out << '"' << r.label << "\"," << to_string(v.method) << ',' << r.cppp << ',' << v.se << ',' << r.cppp - v.se
          << ',' << r.cppp + v.se << '\n';
}

}  // namespace cpppkit
