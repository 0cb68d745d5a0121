#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "cpppkit/model.hpp"

namespace cpppkit {

/// |y_(61) - μ| - |y_(6) - μ| with 1-based ascending order statistics.
double newcomb_discrepancy(std::span<const double> y, double mu);

/// Σ log N(y_i; μ, σ²) under a flat prior on (μ, log σ).
double newcomb_log_posterior(double mu, double log_sigma, std::span<const double> y);

/// Analytic gradient of newcomb_log_posterior in (μ, log σ).
std::array<double, 2> newcomb_log_posterior_gradient(double mu, double log_sigma, std::span<const double> y);

/// Σ (y_i - E[y_i|θ])² / V[y_i|θ].
double chi2_discrepancy(std::span<const double> y, std::span<const double> mean, std::span<const double> variance);

enum class NewcombDiscrepancy { order_statistic, chi2 };

/// Normal model with unknown (μ, σ); parameters are (mu, log_sigma).
class NewcombModel final : public Model {
public:
  explicit NewcombModel(NewcombDiscrepancy discrepancy = NewcombDiscrepancy::order_statistic)
      : discrepancy_(discrepancy) {}

  [[nodiscard]] std::string name() const override { return "newcomb"; }
  [[nodiscard]] std::vector<std::string> parameter_names() const override { return {"mu", "log_sigma"}; }
  [[nodiscard]] double log_posterior(ParamView theta, const Dataset& data) const override;
  [[nodiscard]] Dataset simulate_predictive(ParamView theta, const Dataset& design, RandomStream& rng) const override;
  [[nodiscard]] double discrepancy(const Dataset& data, ParamView theta) const override;
  [[nodiscard]] ParamPoint initial_point(const Dataset& data) const override;
  [[nodiscard]] std::vector<double> initial_scales(const Dataset& data) const override;

private:
  NewcombDiscrepancy discrepancy_;
};

}  // namespace cpppkit
