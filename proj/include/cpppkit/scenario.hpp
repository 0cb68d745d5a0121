#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "cpppkit/dist.hpp"
#include "cpppkit/parallel.hpp"

namespace cpppkit {

/// Beta(a, b) null for ppp(Ỹ), a target cppp and a budget c ≈ r·m̃.
struct ScenarioSpec {
  BetaParams null_shape{2.0, 2.0};
  double cppp_true = 0.2;
  std::int64_t budget = 20000;
  std::vector<std::int64_t> m_grid{10, 20, 50, 100, 200, 500, 1000};
};

void validate_scenario(const ScenarioSpec& spec);

struct ScenarioRow {
  std::int64_t m_tilde = 0;
  std::int64_t r = 0;
  double ppp_y = 0.0;
  double bias = 0.0;  // signed
  double abs_bias = 0.0;
  double se = 0.0;
  double rmse = 0.0;
};

/// F_Beta^{-1}(cppp_true; a, b).
double scenario_ppp_y(const ScenarioSpec& spec);

/// F_BB(floor(m̃·ppp_y); m̃, a, b) - F_Beta(ppp_y; a, b).
double scenario_bias(const ScenarioSpec& spec, std::int64_t m_tilde);

/// F_BB(1 - F_BB) / r at floor(m̃·ppp_y).
double scenario_variance(const ScenarioSpec& spec, std::int64_t m_tilde, std::int64_t r);

ScenarioRow scenario_row(const ScenarioSpec& spec, std::int64_t m_tilde, std::int64_t r);

/// One row per m̃ in the grid with r = floor(c / m̃).
std::vector<ScenarioRow> scenario_grid(const ScenarioSpec& spec, Execution exec = {});

/// Fixed m̃, varying r (budget ignored).
std::vector<ScenarioRow> scenario_fixed_m(const ScenarioSpec& spec, std::int64_t m_tilde,
                                          std::span<const std::int64_t> r_values);

struct SimulationMoments {
  std::size_t n_outer = 0;
  double mean = 0.0;
  double empirical_bias = 0.0;
  double empirical_variance = 0.0;
  double se_bias = 0.0;      // Monte Carlo SE of empirical_bias
  double se_variance = 0.0;  // Monte Carlo SE of empirical_variance
};

/// Brute-force the scenario: n_outer times draw r ppps from the Beta null,
/// r counts k̃ ~ Binomial(m̃, ppp), and form cppp̂.
SimulationMoments scenario_simulate(const ScenarioSpec& spec, std::int64_t m_tilde, std::int64_t r,
                                    std::size_t n_outer, std::uint64_t seed, Execution exec = {});

/// `m_tilde,r,ppp_y,abs_bias,se,rmse`
void write_scenario_csv(std::ostream& out, std::span<const ScenarioRow> rows);
/// `m_tilde,r,abs_bias,se,rmse`
void write_fixed_m_csv(std::ostream& out, std::span<const ScenarioRow> rows);

}  // namespace cpppkit
