#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cpppkit/model.hpp"

namespace cpppkit {

/// 1{Δ_i >= 0}; a tie at exactly zero counts as 1.
struct IndicatorChain {
  std::vector<std::uint8_t> bits;

  [[nodiscard]] std::size_t size() const noexcept { return bits.size(); }
  [[nodiscard]] std::int64_t count() const noexcept;
};

IndicatorChain indicator_chain(const DeltaSeries& deltas);

enum class PppVariant { plain, anti_zero };

struct PppEstimate {
  std::int64_t k = 0;
  std::int64_t m = 0;
  double value = 0.0;
  PppVariant variant = PppVariant::plain;
  double ess = 0.0;  // 0 until filled by ess_batch_means
  double tau = 1.0;
};

/// k/m (plain) or (k + 0.5)/(m + 1) (anti_zero).
PppEstimate ppp_hat(const IndicatorChain& chain, PppVariant variant = PppVariant::plain);

struct EssResult {
  double ess = 0.0;
  double tau = 1.0;
  bool degenerate = false;  // constant chain; ess = m, tau = 1 by convention
};

/// Batch-means effective sample size with batch size floor(sqrt(m)).
/// tau = m / ess is clamped to >= 1.
EssResult ess_batch_means(std::span<const double> series);
EssResult ess_batch_means(std::span<const std::uint8_t> bits);

struct KMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean m·ppp and variance m²·ppp(1-ppp)/ess of the count K.
KMoments k_moments(double ppp, std::int64_t m, double ess);

/// ppp_hat with ess/tau filled from the indicator chain (when m >= 10).
PppEstimate estimate_ppp(const DeltaSeries& deltas, PppVariant variant = PppVariant::plain);

}  // namespace cpppkit
