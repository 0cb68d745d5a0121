#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cpppkit/calibration.hpp"
#include "cpppkit/ppp.hpp"
#include "cpppkit/uncertainty.hpp"

namespace cpppkit {

/// Wall-clock and parallelism facts. Kept apart from the results so two runs
/// that differ only here compare equal.
struct RuntimeInfo {
  double seconds = 0.0;
  double real_seconds = 0.0;
  int workers = 1;
  std::string backend = "openmp";
};

/// Settings echoed into result files for provenance.
using ConfigEcho = std::map<std::string, std::string>;

void write_ppp_json(std::ostream& out, const PppEstimate& ppp, const ConfigEcho& config, const RuntimeInfo& runtime);

void write_cppp_json(std::ostream& out, const CpppEstimate& est, std::span<const VarianceEstimate> uncertainty,
                     const ConfigEcho& config, const RuntimeInfo& runtime);

/// `j,m_tilde,k_tilde,ppp_hat,tau_hat,ess_hat`
void write_replicate_csv(std::ostream& out, std::span<const ReplicateResult> replicates);

struct ReplicateRow {
  std::size_t j = 0;
  std::int64_t m_tilde = 0;
  std::int64_t k_tilde = 0;
  double ppp_hat = 0.0;
  double tau_hat = 0.0;
  double ess_hat = 0.0;
};

std::vector<ReplicateRow> read_replicate_csv(const std::filesystem::path& path);

/// The parts of cppp.json that reporting needs.
struct CpppSummary {
  double ppp_y = 0.0;
  double cppp = 0.0;
  std::size_t r = 0;
  std::string label;
  std::vector<VarianceEstimate> uncertainty;
};

CpppSummary read_cppp_json(const std::filesystem::path& path);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::int64_t count = 0;
};

/// Equal-width bins over [0, 1]; the last bin is closed.
std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bins);

/// `bin_lo,bin_hi,count,ppp_y`
void write_histogram_csv(std::ostream& out, std::span<const HistogramBin> bins, double ppp_y);

/// `label,method,cppp,se,lo,hi`, one row per (result, method).
void write_errorbar_csv(std::ostream& out, std::span<const CpppSummary> results);

}  // namespace cpppkit
