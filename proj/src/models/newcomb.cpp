#include "cpppkit/models/newcomb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "cpppkit/errors.hpp"

namespace cpppkit {

namespace {

const std::vector<double>& reals_of(const Dataset& data) {
  const auto* y = data.reals();
  if (y == nullptr) throw DomainError("the normal model needs a real-valued dataset");
  return *y;
}

}  // namespace

double newcomb_discrepancy(std::span<const double> y, double mu) {
  if (y.size() < 61) throw DomainError("order-statistic discrepancy needs at least 61 observations");
  std::vector<double> work(y.begin(), y.end());
  auto sixth = work.begin() + 5;
  std::nth_element(work.begin(), sixth, work.end());
  const double y6 = *sixth;
  auto sixty_first = work.begin() + 60;
  std::nth_element(sixth + 1, sixty_first, work.end());
  const double y61 = *sixty_first;
  return std::abs(y61 - mu) - std::abs(y6 - mu);
}

double newcomb_log_posterior(double mu, double log_sigma, std::span<const double> y) {
  if (y.size() < 2) throw DomainError("normal log posterior needs at least two observations");
  const double n = static_cast<double>(y.size());
  const double inv_var = std::exp(-2.0 * log_sigma);
  double ss = 0.0;
  for (double v : y) ss += (v - mu) * (v - mu);
  return -0.5 * n * std::log(2.0 * std::numbers::pi) - n * log_sigma - 0.5 * ss * inv_var;
}

std::array<double, 2> newcomb_log_posterior_gradient(double mu, double log_sigma, std::span<const double> y) {
  const double n = static_cast<double>(y.size());
  const double inv_var = std::exp(-2.0 * log_sigma);
  double s = 0.0, ss = 0.0;
  for (double v : y) {
    s += v - mu;
    ss += (v - mu) * (v - mu);
  }
  return {s * inv_var, -n + ss * inv_var};
}

double chi2_discrepancy(std::span<const double> y, std::span<const double> mean, std::span<const double> variance) {
  if (y.size() != mean.size() || y.size() != variance.size()) throw DomainError("chi2 discrepancy: length mismatch");
  double out = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(variance[i] > 0.0)) throw DomainError("chi2 discrepancy needs positive conditional variances");
    out += (y[i] - mean[i]) * (y[i] - mean[i]) / variance[i];
  }
  return out;
}

double NewcombModel::log_posterior(ParamView theta, const Dataset& data) const {
  return newcomb_log_posterior(theta[0], theta[1], reals_of(data));
}

Dataset NewcombModel::simulate_predictive(ParamView theta, const Dataset& design, RandomStream& rng) const {
  const auto n = reals_of(design).size();
  std::normal_distribution<double> dist(theta[0], std::exp(theta[1]));
  std::vector<double> y(n);
  for (auto& v : y) v = dist(rng);
  return Dataset(std::move(y));
}

double NewcombModel::discrepancy(const Dataset& data, ParamView theta) const {
  const auto& y = reals_of(data);
  if (discrepancy_ == NewcombDiscrepancy::order_statistic) return newcomb_discrepancy(y, theta[0]);
  const std::vector<double> mean(y.size(), theta[0]);
  const std::vector<double> var(y.size(), std::exp(2.0 * theta[1]));
  return chi2_discrepancy(y, mean, var);
}

ParamPoint NewcombModel::initial_point(const Dataset& data) const {
  const auto& y = reals_of(data);
  if (y.size() < 2) throw DomainError("normal model needs at least two observations");
  const double n = static_cast<double>(y.size());
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean, std::log(sd > 0.0 ? sd : 1.0)};
}

std::vector<double> NewcombModel::initial_scales(const Dataset& data) const {
  const auto& y = reals_of(data);
  const auto init = initial_point(data);
  const double n = static_cast<double>(y.size());
  // Posterior sds of μ and log σ are about s/√n and 1/√(2n).
  return {2.4 * std::exp(init[1]) / std::sqrt(n), 2.4 / std::sqrt(2.0 * n)};
}

}  // namespace cpppkit
