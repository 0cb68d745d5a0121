#include "cpppkit/ppp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cpppkit/errors.hpp"

namespace cpppkit {

std::int64_t IndicatorChain::count() const noexcept {
  return std::accumulate(bits.begin(), bits.end(), std::int64_t{0});
}

IndicatorChain indicator_chain(const DeltaSeries& deltas) {
  IndicatorChain chain;
  chain.bits.reserve(deltas.size());
  for (double d : deltas.values()) chain.bits.push_back(d >= 0.0 ? 1 : 0);
  return chain;
}

PppEstimate ppp_hat(const IndicatorChain& chain, PppVariant variant) {
  PppEstimate est;
  est.k = chain.count();
  est.m = static_cast<std::int64_t>(chain.size());
  est.variant = variant;
  if (est.m == 0) throw DomainError("ppp of an empty indicator chain");
  const double k = static_cast<double>(est.k);
  const double m = static_cast<double>(est.m);
  est.value = variant == PppVariant::plain ? k / m : (k + 0.5) / (m + 1.0);
  return est;
}

namespace {

template <class T>
EssResult batch_means(std::span<const T> x) {
  const std::size_t m = x.size();
  if (m < 10) throw DomainError("batch-means ESS needs at least 10 values");
  const double md = static_cast<double>(m);

  double mean = 0.0;
  for (auto v : x) mean += static_cast<double>(v);
  mean /= md;
  double ss = 0.0;
  for (auto v : x) ss += (static_cast<double>(v) - mean) * (static_cast<double>(v) - mean);
  if (ss == 0.0) return {md, 1.0, true};
  const double naive_var = ss / (md - 1.0);

  const std::size_t batch = static_cast<std::size_t>(std::floor(std::sqrt(md)));
  const std::size_t batches = m / batch;
  const std::size_t used = batches * batch;
  double used_mean = 0.0;
  std::vector<double> means(batches, 0.0);
  for (std::size_t a = 0; a < batches; ++a) {
    double s = 0.0;
    for (std::size_t i = a * batch; i < (a + 1) * batch; ++i) s += static_cast<double>(x[i]);
    means[a] = s / static_cast<double>(batch);
    used_mean += s;
  }
  used_mean /= static_cast<double>(used);
  double between = 0.0;
  for (double bm : means) between += (bm - used_mean) * (bm - used_mean);
  const double long_run_var = static_cast<double>(batch) * between / static_cast<double>(batches - 1);

  // A zero long-run variance (perfectly balanced batches) is super-efficient; clamp.
  double tau = long_run_var > 0.0 ? long_run_var / naive_var : 1.0;
  tau = std::max(tau, 1.0);
  return {md / tau, tau, false};
}

}  // namespace

EssResult ess_batch_means(std::span<const double> series) { return batch_means(series); }
EssResult ess_batch_means(std::span<const std::uint8_t> bits) { return batch_means(bits); }

KMoments k_moments(double ppp, std::int64_t m, double ess) {
  if (!(ppp >= 0.0 && ppp <= 1.0)) throw DomainError("ppp must lie in [0, 1]");
  if (m < 1) throw DomainError("m must be positive");
  if (!(ess > 0.0)) throw DomainError("ess must be positive");
  const double md = static_cast<double>(m);
  if (ess > md) throw DomainError("ess cannot exceed the chain length");
  return {md * ppp, md * md * ppp * (1.0 - ppp) / ess};
}

PppEstimate estimate_ppp(const DeltaSeries& deltas, PppVariant variant) {
  const auto bits = indicator_chain(deltas);
  auto est = ppp_hat(bits, variant);
  if (bits.size() >= 10) {
    const auto e = ess_batch_means(std::span<const std::uint8_t>(bits.bits));
    est.ess = e.ess;
    est.tau = e.tau;
  } else {
    est.ess = static_cast<double>(bits.size());
  }
  return est;
}

}  // namespace cpppkit
