#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "cpppkit/mcmc.hpp"
#include "cpppkit/model.hpp"
#include "cpppkit/parallel.hpp"
#include "cpppkit/ppp.hpp"

namespace cpppkit {

/// Every replicate chain runs exactly m_tilde iterations.
struct FixedLength {
  std::size_t m_tilde = 100;
};

/// Replicate chains grow in steps of 100 iterations until the batch-means ESS
/// of their indicator chain reaches `target` or `max_iterations` is hit.
/// max_iterations = 0 means "10 · target · τ̂_transfer(0.5)".
struct EssTarget {
  double target = 100.0;
  std::size_t max_iterations = 0;
};

using ChainLengthPolicy = std::variant<FixedLength, EssTarget>;

enum class Thinning { systematic, random };

struct CalibrationPlan {
  std::size_t r = 100;
  ChainLengthPolicy policy = EssTarget{};
  Thinning thinning = Thinning::systematic;
  std::uint64_t master_seed = 1;
  Execution execution{};
  double tau_buffer = 1.0;  // multiplier on transferred τ̂
};

void validate_plan(const CalibrationPlan& plan);

enum class Mixing { good, bad };

/// The long chain on the observed data.
struct RealChainConfig {
  std::size_t m = 4000;
  std::size_t burn_in = 1000;
  Mixing mixing = Mixing::good;
  /// Bad mixing: adaptation off, scales = factor x adapted good-mixing scales.
  /// 15 cuts the indicator-chain ESS of the Newcomb example about 5x.
  double bad_mixing_factor = 15.0;
};

struct ReplicateResult {
  std::size_t j = 0;
  ParamPoint generating_theta;
  std::uint64_t data_digest = 0;
  std::int64_t m_tilde = 0;
  std::int64_t k_tilde = 0;
  double ppp_hat = 0.0;  // anti-zero variant
  std::vector<double> deltas;
  double tau_hat = 1.0;  // transferred from the real-data chain
  double ess_hat = 0.0;  // batch means on the replicate's own indicator chain
  bool ess_short = false;
  std::uint64_t stream_id = 0;
};

struct CalibrationDraw {
  std::size_t index = 0;  // position in S2
  Dataset data;
  ParamPoint theta;
};

struct CpppEstimate {
  double value = 0.0;
  std::size_t r = 0;
  double ppp_y = 0.0;
  std::vector<ReplicateResult> replicates;
  CalibrationPlan plan;
  RealChainConfig real_config;
  PppEstimate real_ppp;
  std::vector<double> real_deltas;
  std::vector<double> replicate_scales;
  double real_acceptance_rate = 0.0;
  double seconds = 0.0;
  double real_seconds = 0.0;
};

/// Indices into S2 (length m): systematic = round(i·m/r) - 1 for i = 1..r,
/// random = r distinct indices. Ascending either way.
std::vector<std::size_t> select_replicate_indices(std::size_t m, std::size_t r, Thinning thinning, RandomStream& rng);

/// Picks r (ỹ_j, θ_j) pairs out of S2.
std::vector<CalibrationDraw> draw_calibration_replicates(std::span<const Dataset> y_star, const PosteriorChain& chain,
                                                         std::size_t r, Thinning thinning, RandomStream& rng);

/// Short chain on ỹ started at the θ that generated it, with no burn-in.
ReplicateResult run_replicate(const Model& model, const Dataset& data, const ParamPoint& theta,
                              const ChainLengthPolicy& policy, const std::vector<double>& scales, RandomStream& rng);

/// Runs every draw on stream(master_seed, replicate j). Result j lands in slot j.
std::vector<ReplicateResult> run_replicates(const Model& model, std::span<const CalibrationDraw> draws,
                                            const ChainLengthPolicy& policy, const std::vector<double>& scales,
                                            std::uint64_t master_seed, Execution exec);

/// (1/r) Σ 1{k̃_j <= m̃_j · ppp_y}.
double cppp_hat(std::span<const ReplicateResult> results, double ppp_y);

struct RealChainRun {
  PosteriorChain chain;
  DeltaSeries deltas;
  PppEstimate ppp;
  std::vector<std::size_t> kept_indices;
  std::vector<Dataset> kept;
};

/// S1 and S2 on the observed data, keeping the y* at `keep`.
RealChainRun run_real_chain(const Model& model, const Dataset& data, const RealChainConfig& config,
                            std::uint64_t master_seed, std::span<const std::size_t> keep = {});

/// The whole pipeline. Bit-identical for any worker count.
CpppEstimate orchestrate(const Model& model, const Dataset& data, const RealChainConfig& real,
                         const CalibrationPlan& plan);

/// (r·m̃/m)·t_ppp seconds.
double cost_model(double r, double m_tilde, double m, double t_ppp_seconds);

}  // namespace cpppkit
