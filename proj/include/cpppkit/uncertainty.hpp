#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cpppkit/calibration.hpp"
#include "cpppkit/model.hpp"
#include "cpppkit/parallel.hpp"
#include "cpppkit/ppp.hpp"
#include "cpppkit/random.hpp"

namespace cpppkit {

/// Estimates a replicate chain's integrated autocorrelation time τ̃(q) from
/// the long real-data Δ chain: threshold it at its own q-quantile,
/// 1{Δ_i <= Δ_q}, and run batch means on the result.
///
/// τ is tabulated on q = 0, 0.01, ..., 1 and linearly interpolated. The end
/// points are degenerate (constant shifted chains) and pinned to τ = 1.
class TransferTable {
public:
  static constexpr std::size_t kGridIntervals = 100;

  explicit TransferTable(const DeltaSeries& real, double tau_buffer = 1.0);

  /// Interpolated τ̂(q) times the buffer; always >= 1.
  [[nodiscard]] double tau(double q) const;
  /// Batch-means result on the exact shifted chain at q (no interpolation, no buffer).
  [[nodiscard]] EssResult direct(double q) const;
  /// Δ_q, the type-1 q-quantile of the real chain.
  [[nodiscard]] double quantile(double q) const;
  /// 1{Δ_i <= Δ_q}.
  [[nodiscard]] std::vector<std::uint8_t> shifted_indicators(double q) const;

  [[nodiscard]] std::span<const double> grid() const noexcept { return tau_grid_; }
  [[nodiscard]] std::size_t chain_length() const noexcept { return deltas_.size(); }
  [[nodiscard]] double buffer() const noexcept { return buffer_; }

private:
  std::vector<double> deltas_;
  std::vector<double> sorted_;
  std::vector<double> tau_grid_;
  double buffer_;
};

/// Fills tau_hat for every replicate from its ppp_hat.
void assign_transfer_tau(std::span<ReplicateResult> results, const TransferTable& table);

enum class VarianceMethod { plugin, bootstrap_mbb, bootstrap_normal };

std::string_view to_string(VarianceMethod method);

struct VarianceEstimate {
  VarianceMethod method = VarianceMethod::plugin;
  double variance = 0.0;
  double se = 0.0;
  std::size_t b = 0;             // bootstrap rounds, 0 for plug-in
  std::size_t block_length = 0;  // MBB only; 0 means floor(sqrt(m̃_j)) per replicate
  double ci_level = 0.95;
  std::array<double, 2> ci{0.0, 0.0};
};

/// Normal approximation with continuity correction to Pr(K̃ <= m̃·ppp_y):
/// F_N(m̃·ppp_y + 1/2; m̃·p̂, τ̂·m̃·p̂(1-p̂)).
double f_hat_normal(std::int64_t m_tilde, double ppp_y, double ppp_j, double tau_j);

/// cppp ± z_{(1+level)/2}·se, clipped to [0, 1].
std::array<double, 2> confidence_interval(double cppp, double se, double level);

/// F̄(1 - F̄)/r with F̂_j from f_hat_normal and τ̂_j from the transfer table.
VarianceEstimate plugin_variance(std::span<const ReplicateResult> results, double ppp_y, const TransferTable& table,
                                 double level = 0.95);

/// Two-stage bootstrap: resample replicates, then moving-block-resample each
/// chosen replicate's Δ chain and recount. Rounds run on independent streams.
VarianceEstimate bootstrap_mbb(std::span<const ReplicateResult> results, double ppp_y, std::size_t b,
                               std::size_t block_length, std::uint64_t seed, Execution exec = {},
                               double level = 0.95);

/// Two-stage bootstrap with k̃*_j ~ round(N(m̃·p̂_j, τ̂_j·m̃·p̂_j(1-p̂_j))) clamped to
/// [0, m̃]. Uses each replicate's tau_hat.
VarianceEstimate bootstrap_normal(std::span<const ReplicateResult> results, double ppp_y, std::size_t b,
                                  std::uint64_t seed, Execution exec = {}, double level = 0.95);

/// Same, with τ̂_j looked up in `table`.
VarianceEstimate bootstrap_normal(std::span<const ReplicateResult> results, double ppp_y, std::size_t b,
                                  const TransferTable& table, std::uint64_t seed, Execution exec = {},
                                  double level = 0.95);

/// One moving-block resample of `series`: ceil(n/L) blocks with uniform
/// starts in [0, n-L], concatenated and truncated to n.
std::vector<double> mbb_resample(std::span<const double> series, std::size_t block_length, RandomStream& rng);

/// Number of non-negative entries in what mbb_resample would return for the
/// same rng state, computed from prefix counts of 1{Δ >= 0}.
std::int64_t mbb_count(std::span<const std::int64_t> prefix, std::size_t block_length, RandomStream& rng);

}  // namespace cpppkit
