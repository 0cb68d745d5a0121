#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cpppkit/errors.hpp"
#include "cpppkit/ppp.hpp"

using namespace cpppkit;

namespace {

// Symmetric two-state chain that stays put with probability `stay`;
// τ = (1 + λ)/(1 - λ) with λ = 2·stay - 1.
std::vector<std::uint8_t> two_state_chain(std::size_t m, double stay, RandomStream& rng) {
  std::vector<std::uint8_t> x(m);
  x[0] = rng.uniform() < 0.5 ? 1 : 0;
  for (std::size_t i = 1; i < m; ++i) x[i] = rng.uniform() < stay ? x[i - 1] : 1 - x[i - 1];
  return x;
}

std::vector<double> ar1(std::size_t m, double phi, RandomStream& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> x(m);
  x[0] = z(rng) / std::sqrt(1.0 - phi * phi);
  for (std::size_t i = 1; i < m; ++i) x[i] = phi * x[i - 1] + z(rng);
  return x;
}

}  // namespace

TEST_CASE("indicator chain and ppp estimates", "[ppp]") {
  const DeltaSeries d({-1.0, 0.0, 2.0, -0.5, 3.0, -2.0, -1.0, 0.1, -4.0, -3.0}, DeltaSource::real_data);
  const auto ind = indicator_chain(d);
  CHECK(ind.count() == 4);  // the tie at zero counts
  const auto plain = ppp_hat(ind);
  CHECK(plain.k == 4);
  CHECK(plain.m == 10);
  CHECK(plain.value == 0.4);
  const auto anti = ppp_hat(ind, PppVariant::anti_zero);
  CHECK(anti.value == 4.5 / 11.0);
  const auto est = estimate_ppp(d);
  CHECK(est.ess > 0.0);
  CHECK(est.tau >= 1.0);
  CHECK_THROWS_AS(DeltaSeries({}, DeltaSource::replicate), DomainError);
  CHECK_THROWS_AS(DeltaSeries({1.0, NAN}, DeltaSource::replicate), NumericError);
}

TEST_CASE("anti-zero estimate never hits 0 or 1", "[ppp]") {
  IndicatorChain none{std::vector<std::uint8_t>(50, 0)};
  IndicatorChain all{std::vector<std::uint8_t>(50, 1)};
  CHECK(ppp_hat(none, PppVariant::anti_zero).value > 0.0);
  CHECK(ppp_hat(all, PppVariant::anti_zero).value < 1.0);
  CHECK(ppp_hat(none).value == 0.0);
}

TEST_CASE("batch means on iid draws gives tau near 1", "[ppp]") {
  RandomStream rng(1, 0);
  std::vector<std::uint8_t> bits(100000);
  for (auto& b : bits) b = rng.uniform() < 0.3 ? 1 : 0;
  const auto r = ess_batch_means(std::span<const std::uint8_t>(bits));
  CHECK(r.tau < 1.25);
  CHECK_FALSE(r.degenerate);
}

TEST_CASE("batch means recovers a known autocorrelation time", "[ppp]") {
  RandomStream rng(2, 0);
  const auto bits = two_state_chain(1000000, 0.9, rng);  // τ = 9
  const auto r = ess_batch_means(std::span<const std::uint8_t>(bits));
  CHECK(std::abs(r.tau / 9.0 - 1.0) < 0.1);

  const auto x = ar1(1000000, 0.9, rng);  // τ = 19
  const auto s = ess_batch_means(std::span<const double>(x));
  CHECK(std::abs(s.tau / 19.0 - 1.0) < 0.15);
}

TEST_CASE("complementing the indicators leaves the ESS unchanged", "[ppp]") {
  RandomStream rng(3, 0);
  auto bits = two_state_chain(5000, 0.8, rng);
  const auto a = ess_batch_means(std::span<const std::uint8_t>(bits));
  for (auto& b : bits) b = 1 - b;
  const auto b = ess_batch_means(std::span<const std::uint8_t>(bits));
  CHECK(std::abs(a.ess - b.ess) < 1e-9 * a.ess);
}

TEST_CASE("ESS falls as the chain gets stickier", "[ppp]") {
  double prev = 1e18;
  for (double stay : {0.5, 0.7, 0.9, 0.97}) {
    RandomStream rng(4, 0);
    const auto bits = two_state_chain(200000, stay, rng);
    const double ess = ess_batch_means(std::span<const std::uint8_t>(bits)).ess;
    CHECK(ess < prev);
    prev = ess;
  }
}

TEST_CASE("degenerate and short chains", "[ppp]") {
  const std::vector<std::uint8_t> flat(100, 1);
  const auto r = ess_batch_means(std::span<const std::uint8_t>(flat));
  CHECK(r.degenerate);
  CHECK(r.ess == 100.0);
  CHECK(r.tau == 1.0);
  const std::vector<double> short_chain(9, 0.5);
  CHECK_THROWS_AS(ess_batch_means(std::span<const double>(short_chain)), DomainError);
}

TEST_CASE("moments of the indicator count", "[ppp]") {
  const auto k = k_moments(0.2, 1000, 250.0);
  CHECK(k.mean == 200.0);
  CHECK(std::abs(k.variance - 1000.0 * 1000.0 * 0.2 * 0.8 / 250.0) < 1e-9);
  CHECK_THROWS_AS(k_moments(0.2, 100, 200.0), DomainError);
  CHECK_THROWS_AS(k_moments(1.2, 100, 50.0), DomainError);
}
