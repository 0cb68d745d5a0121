#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cpppkit/dist.hpp"
#include "cpppkit/errors.hpp"
#include "cpppkit/io.hpp"
#include "cpppkit/models/newcomb.hpp"
#include "cpppkit/uncertainty.hpp"

using namespace cpppkit;

namespace {

std::vector<double> ar1(std::size_t m, double phi, RandomStream& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> x(m);
  x[0] = z(rng) / std::sqrt(1.0 - phi * phi);
  for (std::size_t i = 1; i < m; ++i) x[i] = phi * x[i - 1] + z(rng);
  return x;
}

std::vector<ReplicateResult> iid_replicates(std::size_t r, std::size_t m_tilde, RandomStream& rng) {
  std::vector<ReplicateResult> out(r);
  for (std::size_t j = 0; j < r; ++j) {
    const double p = rng.uniform();
    auto& res = out[j];
    res.j = j;
    res.m_tilde = static_cast<std::int64_t>(m_tilde);
    for (std::size_t i = 0; i < m_tilde; ++i) res.deltas.push_back(rng.uniform() < p ? 1.0 : -1.0);
    res.k_tilde = std::count_if(res.deltas.begin(), res.deltas.end(), [](double d) { return d >= 0.0; });
    res.ppp_hat = (res.k_tilde + 0.5) / (m_tilde + 1.0);
    res.tau_hat = 1.0;
  }
  return out;
}

double bootstrap_se_of_variance(const VarianceEstimate& v) {
  // Sample variance of b draws has SE ≈ variance·sqrt(2/(b-1)).
  return v.variance * std::sqrt(2.0 / (static_cast<double>(v.b) - 1.0));
}

}  // namespace

TEST_CASE("shifted indicators hit the quantile level", "[uncertainty]") {
  RandomStream rng(1, 0);
  const DeltaSeries d(ar1(4000, 0.5, rng), DeltaSource::real_data);
  const TransferTable table(d);
  for (double q : {0.01, 0.3, 0.37, 0.5, 0.815, 0.99}) {
    const auto bits = table.shifted_indicators(q);
    double frac = 0.0;
    for (auto b : bits) frac += b;
    frac /= static_cast<double>(bits.size());
    CHECK(std::abs(frac - q) <= 1.0 / 4000.0 + 1e-15);
  }
  CHECK(table.grid().size() == 101);
  CHECK(table.grid().front() == 1.0);
  CHECK(table.grid().back() == 1.0);
}

TEST_CASE("transfer tau is near 1 on iid chains", "[uncertainty]") {
  RandomStream rng(2, 0);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> x(10000);
  for (auto& v : x) v = z(rng);
  const TransferTable table(DeltaSeries(x, DeltaSource::real_data));
  for (double q : {0.2, 0.5, 0.8}) {
    CHECK(table.tau(q) >= 0.8);
    CHECK(table.tau(q) <= 1.2);
  }
  const TransferTable buffered(DeltaSeries(x, DeltaSource::real_data), 1.5);
  CHECK(buffered.tau(0.5) == 1.5 * table.tau(0.5));
}

TEST_CASE("transfer tau tracks a fresh chain from the same AR(1) kernel", "[uncertainty]") {
  RandomStream rng(3, 0);
  const TransferTable table(DeltaSeries(ar1(4000, 0.9, rng), DeltaSource::real_data));
  const auto fresh = ar1(400000, 0.9, rng);
  for (double q : {0.2, 0.5, 0.8}) {
    // Shift the fresh chain so that Pr(Δ >= 0) = 1 - q, then threshold.
    const double cut = std::sqrt(1.0 / (1.0 - 0.81)) * normal_quantile(q);
    std::vector<std::uint8_t> bits(fresh.size());
    for (std::size_t i = 0; i < fresh.size(); ++i) bits[i] = fresh[i] <= cut ? 1 : 0;
    const double direct = ess_batch_means(std::span<const std::uint8_t>(bits)).tau;
    INFO("q=" << q << " transfer=" << table.tau(q) << " direct=" << direct);
    CHECK(table.tau(q) >= 0.5 * direct);
    CHECK(table.tau(q) <= 2.0 * direct);
  }
  // Interpolated values sit between the neighbouring grid points.
  const double mid = table.tau(0.505);
  CHECK(mid >= std::min(table.grid()[50], table.grid()[51]) - 1e-12);
  CHECK(mid <= std::max(table.grid()[50], table.grid()[51]) + 1e-12);
}

TEST_CASE("transfer table preconditions", "[uncertainty]") {
  CHECK_THROWS_AS(TransferTable(DeltaSeries(std::vector<double>(999, 1.0), DeltaSource::real_data)), DomainError);
  CHECK_THROWS_AS(TransferTable(DeltaSeries(std::vector<double>(1000, 1.0), DeltaSource::real_data), 0.9),
                  DomainError);
}

TEST_CASE("normal approximation to the replicate CDF", "[uncertainty]") {
  CHECK(std::abs(f_hat_normal(100, 0.5, 0.3, 1.0) - normal_cdf((50.5 - 30.0) / std::sqrt(21.0))) < 1e-15);
  CHECK(std::abs(f_hat_normal(100, 0.5, 0.3, 1.0) - 0.999996) < 5e-7);
  CHECK(std::abs(f_hat_normal(1000000, 0.4, 0.4, 1.0) - 0.5) < 0.01);
  double prev = f_hat_normal(100, 0.5, 0.3, 1.0);
  for (double tau : {2.0, 10.0, 100.0, 1e4}) {
    const double f = f_hat_normal(100, 0.5, 0.3, tau);
    CHECK(f < prev);
    CHECK(f > 0.5);
    prev = f;
  }
}

TEST_CASE("confidence intervals", "[uncertainty]") {
  const auto ci = confidence_interval(0.5, 0.1, 0.95);
  CHECK(std::abs(ci[0] - 0.304) < 1e-3);
  CHECK(std::abs(ci[1] - 0.696) < 1e-3);
  const auto clipped = confidence_interval(0.02, 0.05, 0.95);
  CHECK(clipped[0] == 0.0);
  CHECK_THROWS_AS(confidence_interval(0.5, 0.1, 1.0), DomainError);
}

TEST_CASE("plug-in variance limits", "[uncertainty]") {
  RandomStream rng(4, 0);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> x(2000);
  for (auto& v : x) v = z(rng);
  const TransferTable table(DeltaSeries(x, DeltaSource::real_data));
  // Far-apart ppps make every F̂_j 0 or 1: two of five replicates land below ppp_y.
  std::vector<ReplicateResult> res(5);
  const double ppps[] = {0.05, 0.9, 0.95, 0.1, 0.99};
  for (std::size_t j = 0; j < 5; ++j) {
    res[j].m_tilde = 100000;
    res[j].ppp_hat = ppps[j];
    res[j].k_tilde = static_cast<std::int64_t>(ppps[j] * 100000);
  }
  const auto v = plugin_variance(res, 0.5, table);
  CHECK(std::abs(v.variance - 0.4 * 0.6 / 5.0) < 1e-9);
  CHECK(v.method == VarianceMethod::plugin);
  // ppp_j = ppp_y with a huge m̃ puts every F̂_j at one half.
  for (auto& r : res) r.ppp_hat = 0.5;
  CHECK(std::abs(plugin_variance(res, 0.5, table).variance - 0.25 / 5.0) < 1e-4);
}

TEST_CASE("moving-block resampling", "[uncertainty]") {
  std::vector<double> series(50);
  for (std::size_t i = 0; i < series.size(); ++i) series[i] = static_cast<double>(i) - 20.0;
  RandomStream rng(5, 0);
  CHECK(mbb_resample(series, 50, rng) == series);
  const auto res = mbb_resample(series, 7, rng);
  CHECK(res.size() == 50);
  for (std::size_t i = 1; i < 7; ++i) CHECK(res[i] == res[i - 1] + 1.0);
  CHECK_THROWS_AS(mbb_resample(series, 51, rng), DomainError);

  std::vector<std::int64_t> prefix(51, 0);
  for (std::size_t i = 0; i < 50; ++i) prefix[i + 1] = prefix[i] + (series[i] >= 0.0 ? 1 : 0);
  for (std::size_t len : {1, 3, 7, 13, 50}) {
    RandomStream a(6, len), b(6, len);
    for (int rep = 0; rep < 20; ++rep) {
      const auto full = mbb_resample(series, len, a);
      const auto k = std::count_if(full.begin(), full.end(), [](double d) { return d >= 0.0; });
      CHECK(mbb_count(prefix, len, b) == k);
    }
  }
}

TEST_CASE("bootstrap estimators", "[uncertainty]") {
  RandomStream rng(7, 0);
  const auto res = iid_replicates(200, 200, rng);
  const double ppp_y = 0.3;

  SECTION("whole-chain blocks leave only the outer resampling") {
    const auto whole = bootstrap_mbb(res, ppp_y, 400, 200, 11);
    const double c = cppp_hat(res, ppp_y);
    CHECK(std::abs(whole.variance - c * (1.0 - c) / 200.0) < 4.0 * bootstrap_se_of_variance(whole));
  }
  SECTION("block length does not matter for iid chains") {
    const auto one = bootstrap_mbb(res, ppp_y, 400, 1, 12);
    const auto twenty = bootstrap_mbb(res, ppp_y, 400, 20, 13);
    const double se = std::hypot(bootstrap_se_of_variance(one), bootstrap_se_of_variance(twenty));
    CHECK(std::abs(one.variance - twenty.variance) < 3.0 * se);
  }
  SECTION("normal-approximation bootstrap agrees with MBB") {
    const auto mbb = bootstrap_mbb(res, ppp_y, 400, 0, 14);
    const auto normal = bootstrap_normal(res, ppp_y, 400, 15);
    const double se = std::hypot(bootstrap_se_of_variance(mbb), bootstrap_se_of_variance(normal));
    CHECK(std::abs(mbb.variance - normal.variance) < 3.0 * se);
    CHECK(normal.b == 400);
  }
  SECTION("identical resamples give zero variance") {
    std::vector<ReplicateResult> same(1, res.front());
    CHECK(bootstrap_mbb(same, ppp_y, 50, 200, 16).variance == 0.0);
    auto flat = res;
    for (auto& r : flat) r.tau_hat = 0.0;
    std::vector<ReplicateResult> one(1, flat.front());
    CHECK(bootstrap_normal(one, ppp_y, 50, 17).variance == 0.0);
  }
  SECTION("rounds are independent of the worker count") {
    const auto serial = bootstrap_mbb(res, ppp_y, 100, 0, 18, {Backend::serial, 1});
    const auto parallel = bootstrap_mbb(res, ppp_y, 100, 0, 18, {Backend::openmp, 4});
    CHECK(serial.variance == parallel.variance);
  }
  CHECK_THROWS_AS(bootstrap_mbb(res, ppp_y, 1, 0, 1), DomainError);
}

TEST_CASE("method names", "[uncertainty]") {
  CHECK(to_string(VarianceMethod::plugin) == "plugin");
  CHECK(to_string(VarianceMethod::bootstrap_mbb) == "bootstrap_mbb");
  CHECK(to_string(VarianceMethod::bootstrap_normal) == "bootstrap_normal");
}
