#pragma once

#include <cstdint>
#include <span>

#include "cpppkit/random.hpp"

namespace cpppkit {

struct BetaParams {
  double a = 1.0;
  double b = 1.0;
};

struct BetaBinomialParams {
  std::int64_t trials = 1;
  BetaParams shape;
};

/// ln Γ(x) for x > 0.
double log_gamma(double x);

/// Regularized incomplete beta I_x(a, b).
double beta_cdf(double x, BetaParams p);

/// Inverse of beta_cdf in x.
double beta_quantile(double q, BetaParams p);

/// Σ_{j<=k} pmf(j; n, a, b). k < 0 gives 0, k >= n gives 1.
double beta_binomial_cdf(std::int64_t k, BetaBinomialParams p);

/// Φ((x - mean) / sqrt(variance)); a zero variance degenerates to 1{x >= mean}.
double normal_cdf(double x, double mean = 0.0, double variance = 1.0);

/// Standard normal quantile.
double normal_quantile(double q);

double sample_beta(BetaParams p, RandomStream& rng);
std::int64_t sample_binomial(std::int64_t n, double prob, RandomStream& rng);
double sample_normal(double mean, double sd, RandomStream& rng);

/// Inverse-ECDF (type 1) quantile: the smallest element x with
/// #{s <= x} / n >= q.
double empirical_quantile(std::span<const double> series, double q);

}  // namespace cpppkit
