#include "cpppkit/dist.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "cpppkit/errors.hpp"

namespace cpppkit {

namespace {

void check_shape(BetaParams p) {
  if (!(p.a > 0.0) || !(p.b > 0.0) || !std::isfinite(p.a) || !std::isfinite(p.b))
    throw DomainError("beta shape parameters must be positive and finite");
}

void check_probability(double q, const char* what) {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError(std::string(what) + " must lie in [0, 1]");
}

double log_add(double x, double y) {
  if (x == -INFINITY) return y;
  if (y == -INFINITY) return x;
  const double hi = std::max(x, y);
  return hi + std::log1p(std::exp(std::min(x, y) - hi));
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("log_gamma requires a positive finite argument");
  return boost::math::lgamma(x);
}

double beta_cdf(double x, BetaParams p) {
  check_shape(p);
  check_probability(x, "beta_cdf argument");
  return boost::math::ibeta(p.a, p.b, x);
}

double beta_quantile(double q, BetaParams p) {
  check_shape(p);
  check_probability(q, "beta_quantile probability");
  return boost::math::ibeta_inv(p.a, p.b, q);
}

double beta_binomial_cdf(std::int64_t k, BetaBinomialParams p) {
  check_shape(p.shape);
  if (p.trials < 1) throw DomainError("beta-binomial needs at least one trial");
  if (k < 0) return 0.0;
  if (k >= p.trials) return 1.0;

  const double n = static_cast<double>(p.trials);
  const double a = p.shape.a;
  const double b = p.shape.b;
  const double log_norm = log_gamma(n + 1.0) - boost::math::lgamma(a) - boost::math::lgamma(b) +
                          boost::math::lgamma(a + b) - boost::math::lgamma(n + a + b);
  double acc = -INFINITY;
  for (std::int64_t j = 0; j <= k; ++j) {
    const double jj = static_cast<double>(j);
    const double term = log_norm - boost::math::lgamma(jj + 1.0) - boost::math::lgamma(n - jj + 1.0) +
                        boost::math::lgamma(jj + a) + boost::math::lgamma(n - jj + b);
    acc = log_add(acc, term);
  }
  return std::clamp(std::exp(acc), 0.0, 1.0);
}

double normal_cdf(double x, double mean, double variance) {
  if (!(variance >= 0.0)) throw DomainError("normal_cdf variance must be non-negative");
  if (variance == 0.0) return x >= mean ? 1.0 : 0.0;
  return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

double normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("normal_quantile probability must lie in (0, 1)");
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * q);
}

double sample_beta(BetaParams p, RandomStream& rng) {
  check_shape(p);
  std::gamma_distribution<double> ga(p.a, 1.0);
  std::gamma_distribution<double> gb(p.b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

std::int64_t sample_binomial(std::int64_t n, double prob, RandomStream& rng) {
  if (n < 0) throw DomainError("binomial trial count must be non-negative");
  check_probability(prob, "binomial probability");
  if (n == 0 || prob == 0.0) return 0;
  if (prob == 1.0) return n;
  std::binomial_distribution<std::int64_t> dist(n, prob);
  return dist(rng);
}

double sample_normal(double mean, double sd, RandomStream& rng) {
  std::normal_distribution<double> dist(mean, sd);
  return dist(rng);
}

double empirical_quantile(std::span<const double> series, double q) {
  if (series.empty()) throw DomainError("empirical_quantile of an empty series");
  check_probability(q, "quantile level");
  std::vector<double> work(series.begin(), series.end());
  const auto n = work.size();
  // q * n can land one ulp above an integer (0.3 * 10); shave it off before ceil.
  const double target = q * static_cast<double>(n) * (1.0 - 1e-12);
  auto rank = static_cast<std::size_t>(std::ceil(target));
  rank = std::clamp<std::size_t>(rank, 1, n);
  auto nth = work.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(work.begin(), nth, work.end());
  return *nth;
}

}  // namespace cpppkit
