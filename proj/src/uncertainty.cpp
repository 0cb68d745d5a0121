#include "cpppkit/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cpppkit/dist.hpp"
#include "cpppkit/errors.hpp"

namespace cpppkit {

namespace {

std::size_t grid_rank(std::size_t n, double q) {
  const double target = q * static_cast<double>(n) * (1.0 - 1e-12);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(target)), 1, n);
}

double sample_variance(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / (n - 1.0);
}

VarianceEstimate finish(VarianceMethod method, double variance, double cppp, double level) {
  VarianceEstimate v;
  v.method = method;
  v.variance = std::max(variance, 0.0);
  v.se = std::sqrt(v.variance);
  v.ci_level = level;
  v.ci = confidence_interval(cppp, v.se, level);
  return v;
}

std::size_t block_length_for(std::size_t requested, std::size_t m) {
  if (requested == 0) return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(m)))));
  return std::min(requested, m);
}

}  // namespace

TransferTable::TransferTable(const DeltaSeries& real, double tau_buffer)
    : deltas_(real.values().begin(), real.values().end()), sorted_(deltas_), buffer_(tau_buffer) {
  if (deltas_.size() < 1000) throw DomainError("transfer table needs a real-data chain of length >= 1000");
  if (!(tau_buffer >= 1.0)) throw DomainError("tau_buffer must be >= 1");
  std::sort(sorted_.begin(), sorted_.end());
  tau_grid_.assign(kGridIntervals + 1, 1.0);
  for (std::size_t g = 1; g < kGridIntervals; ++g) {
    const auto e = direct(static_cast<double>(g) / kGridIntervals);
    tau_grid_[g] = e.degenerate ? 1.0 : e.tau;
  }
}

double TransferTable::quantile(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
  return sorted_[grid_rank(sorted_.size(), q) - 1];
}

std::vector<std::uint8_t> TransferTable::shifted_indicators(double q) const {
  const double cut = quantile(q);
  std::vector<std::uint8_t> bits(deltas_.size());
  std::transform(deltas_.begin(), deltas_.end(), bits.begin(), [cut](double d) { return d <= cut ? 1 : 0; });
  return bits;
}

EssResult TransferTable::direct(double q) const {
  const auto bits = shifted_indicators(q);
  return ess_batch_means(std::span<const std::uint8_t>(bits));
}

double TransferTable::tau(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("transfer tau needs q in [0, 1]");
  const double x = q * kGridIntervals;
  const auto lo = std::min<std::size_t>(static_cast<std::size_t>(std::floor(x)), kGridIntervals - 1);
  const double frac = x - static_cast<double>(lo);
  const double t = tau_grid_[lo] + frac * (tau_grid_[lo + 1] - tau_grid_[lo]);
  return std::max(1.0, t) * buffer_;
}

void assign_transfer_tau(std::span<ReplicateResult> results, const TransferTable& table) {
  for (auto& r : results) r.tau_hat = table.tau(r.ppp_hat);
}

std::string_view to_string(VarianceMethod method) {
  switch (method) {
    case VarianceMethod::plugin:
      return "plugin";
    case VarianceMethod::bootstrap_mbb:
      return "bootstrap_mbb";
    case VarianceMethod::bootstrap_normal:
      return "bootstrap_normal";
  }
  return "unknown";
}

double f_hat_normal(std::int64_t m_tilde, double ppp_y, double ppp_j, double tau_j) {
  const double m = static_cast<double>(m_tilde);
  return normal_cdf(m * ppp_y + 0.5, m * ppp_j, tau_j * m * ppp_j * (1.0 - ppp_j));
}

std::array<double, 2> confidence_interval(double cppp, double se, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
  if (!(se >= 0.0)) throw DomainError("standard error must be non-negative");
  const double z = normal_quantile(0.5 * (1.0 + level));
  return {std::clamp(cppp - z * se, 0.0, 1.0), std::clamp(cppp + z * se, 0.0, 1.0)};
}

VarianceEstimate plugin_variance(std::span<const ReplicateResult> results, double ppp_y, const TransferTable& table,
                                 double level) {
  if (results.size() < 2) throw DomainError("plug-in variance needs r >= 2");
  double f_bar = 0.0;
  for (const auto& res : results)
    f_bar += f_hat_normal(res.m_tilde, ppp_y, res.ppp_hat, table.tau(res.ppp_hat));
  f_bar /= static_cast<double>(results.size());
  const double r = static_cast<double>(results.size());
  return finish(VarianceMethod::plugin, f_bar * (1.0 - f_bar) / r, cppp_hat(results, ppp_y), level);
}

std::vector<double> mbb_resample(std::span<const double> series, std::size_t block_length, RandomStream& rng) {
  const std::size_t n = series.size();
  if (n == 0) throw DomainError("cannot resample an empty series");
  if (block_length < 1 || block_length > n) throw DomainError("block length must lie in [1, n]");
  std::uniform_int_distribution<std::size_t> start(0, n - block_length);
  std::vector<double> out;
  out.reserve(n + block_length);
  while (out.size() < n) {
    const auto s = start(rng);
    out.insert(out.end(), series.begin() + static_cast<std::ptrdiff_t>(s),
               series.begin() + static_cast<std::ptrdiff_t>(s + block_length));
  }
  out.resize(n);
  return out;
}

std::int64_t mbb_count(std::span<const std::int64_t> prefix, std::size_t block_length, RandomStream& rng) {
  const std::size_t n = prefix.size() - 1;
  std::uniform_int_distribution<std::size_t> start(0, n - block_length);
  std::int64_t k = 0;
  std::size_t filled = 0;
  while (filled < n) {
    const auto s = start(rng);
    const auto take = std::min(block_length, n - filled);
    k += prefix[s + take] - prefix[s];
    filled += take;
  }
  return k;
}

VarianceEstimate bootstrap_mbb(std::span<const ReplicateResult> results, double ppp_y, std::size_t b,
                               std::size_t block_length, std::uint64_t seed, Execution exec, double level) {
  if (b < 2) throw DomainError("bootstrap needs b >= 2");
  if (results.empty()) throw DomainError("bootstrap needs at least one replicate");
  const std::size_t r = results.size();

  std::vector<std::vector<std::int64_t>> prefix(r);
  std::vector<std::size_t> lengths(r);
  for (std::size_t j = 0; j < r; ++j) {
    const auto& d = results[j].deltas;
    if (d.empty()) throw DomainError("MBB needs the replicate delta chains");
    prefix[j].assign(d.size() + 1, 0);
    for (std::size_t i = 0; i < d.size(); ++i) prefix[j][i + 1] = prefix[j][i] + (d[i] >= 0.0 ? 1 : 0);
    lengths[j] = block_length_for(block_length, d.size());
  }

  std::vector<double> rounds(b);
  for_each_index(b, exec, [&](std::size_t l) {
    RandomStream rng(seed, stream_id(StreamPurpose::bootstrap_mbb, l));
    std::uniform_int_distribution<std::size_t> pick(0, r - 1);
    std::size_t inside = 0;
    for (std::size_t i = 0; i < r; ++i) {
      const auto j = pick(rng);
      const auto k = mbb_count(prefix[j], lengths[j], rng);
      if (static_cast<double>(k) <= static_cast<double>(results[j].m_tilde) * ppp_y) ++inside;
    }
    rounds[l] = static_cast<double>(inside) / static_cast<double>(r);
  });

  auto v = finish(VarianceMethod::bootstrap_mbb, sample_variance(rounds), cppp_hat(results, ppp_y), level);
  v.b = b;
  v.block_length = block_length;
  return v;
}

VarianceEstimate bootstrap_normal(std::span<const ReplicateResult> results, double ppp_y, std::size_t b,
                                  std::uint64_t seed, Execution exec, double level) {
  if (b < 2) throw DomainError("bootstrap needs b >= 2");
  if (results.empty()) throw DomainError("bootstrap needs at least one replicate");
  const std::size_t r = results.size();

  std::vector<double> rounds(b);
  for_each_index(b, exec, [&](std::size_t l) {
    RandomStream rng(seed, stream_id(StreamPurpose::bootstrap_normal, l));
    std::uniform_int_distribution<std::size_t> pick(0, r - 1);
    std::normal_distribution<double> z(0.0, 1.0);
    std::size_t inside = 0;
    for (std::size_t i = 0; i < r; ++i) {
      const auto& res = results[pick(rng)];
      const double m = static_cast<double>(res.m_tilde);
      const double p = res.ppp_hat;
      const double sd = std::sqrt(std::max(res.tau_hat, 0.0) * m * p * (1.0 - p));
      const double k = std::clamp(std::round(m * p + sd * z(rng)), 0.0, m);
      if (k <= m * ppp_y) ++inside;
    }
    rounds[l] = static_cast<double>(inside) / static_cast<double>(r);
  });

  auto v = finish(VarianceMethod::bootstrap_normal, sample_variance(rounds), cppp_hat(results, ppp_y), level);
  v.b = b;
  return v;
}

VarianceEstimate bootstrap_normal(std::span<const ReplicateResult> results, double ppp_y, std::size_t b,
                                  const TransferTable& table, std::uint64_t seed, Execution exec, double level) {
  std::vector<ReplicateResult> copy(results.begin(), results.end());
  assign_transfer_tau(copy, table);
  return bootstrap_normal(copy, ppp_y, b, seed, exec, level);
}

}  // namespace cpppkit
