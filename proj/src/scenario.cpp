#include "cpppkit/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "cpppkit/errors.hpp"

namespace cpppkit {

namespace {

double bb_at_threshold(const ScenarioSpec& spec, std::int64_t m_tilde) {
  const double threshold = static_cast<double>(m_tilde) * scenario_ppp_y(spec);
  return beta_binomial_cdf(static_cast<std::int64_t>(std::floor(threshold)), {m_tilde, spec.null_shape});
}

}  // namespace

void validate_scenario(const ScenarioSpec& spec) {
  if (!(spec.null_shape.a > 0.0 && spec.null_shape.b > 0.0)) throw DomainError("Beta shapes must be positive");
  if (!(spec.cppp_true > 0.0 && spec.cppp_true < 1.0)) throw DomainError("cppp_true must lie in (0, 1)");
  if (spec.budget < 1) throw DomainError("budget must be positive");
  if (spec.m_grid.empty()) throw DomainError("m_tilde grid must not be empty");
  for (auto m : spec.m_grid)
    if (m < 1 || m > spec.budget) throw DomainError("every m_tilde must lie in [1, budget]");
}

double scenario_ppp_y(const ScenarioSpec& spec) { return beta_quantile(spec.cppp_true, spec.null_shape); }

double scenario_bias(const ScenarioSpec& spec, std::int64_t m_tilde) {
  if (m_tilde < 1) throw DomainError("m_tilde must be >= 1");
  return bb_at_threshold(spec, m_tilde) - beta_cdf(scenario_ppp_y(spec), spec.null_shape);
}

double scenario_variance(const ScenarioSpec& spec, std::int64_t m_tilde, std::int64_t r) {
  if (r < 1) throw DomainError("r must be >= 1");
  if (m_tilde < 1) throw DomainError("m_tilde must be >= 1");
  const double f = bb_at_threshold(spec, m_tilde);
  return f * (1.0 - f) / static_cast<double>(r);
}

ScenarioRow scenario_row(const ScenarioSpec& spec, std::int64_t m_tilde, std::int64_t r) {
  ScenarioRow row;
  row.m_tilde = m_tilde;
  row.r = r;
  row.ppp_y = scenario_ppp_y(spec);
  row.bias = scenario_bias(spec, m_tilde);
  row.abs_bias = std::abs(row.bias);
  const double var = scenario_variance(spec, m_tilde, r);
  row.se = std::sqrt(var);
  row.rmse = std::sqrt(row.bias * row.bias + var);
  return row;
}

std::vector<ScenarioRow> scenario_grid(const ScenarioSpec& spec, Execution exec) {
  validate_scenario(spec);
  std::vector<ScenarioRow> rows(spec.m_grid.size());
  for_each_index(rows.size(), exec, [&](std::size_t i) {
    const auto m = spec.m_grid[i];
    rows[i] = scenario_row(spec, m, spec.budget / m);
  });
  return rows;
}

std::vector<ScenarioRow> scenario_fixed_m(const ScenarioSpec& spec, std::int64_t m_tilde,
                                          std::span<const std::int64_t> r_values) {
  std::vector<ScenarioRow> rows;
  rows.reserve(r_values.size());
  for (auto r : r_values) rows.push_back(scenario_row(spec, m_tilde, r));
  return rows;
}

SimulationMoments scenario_simulate(const ScenarioSpec& spec, std::int64_t m_tilde, std::int64_t r,
                                    std::size_t n_outer, std::uint64_t seed, Execution exec) {
  if (n_outer < 100) throw DomainError("scenario simulation needs n_outer >= 100");
  if (m_tilde < 1 || r < 1) throw DomainError("m_tilde and r must be >= 1");
  const double ppp_y = scenario_ppp_y(spec);
  const double threshold = static_cast<double>(m_tilde) * ppp_y;

  std::vector<double> cppp(n_outer);
  for_each_index(n_outer, exec, [&](std::size_t o) {
    RandomStream rng(seed, stream_id(StreamPurpose::simulation, o));
    std::int64_t inside = 0;
    for (std::int64_t j = 0; j < r; ++j) {
      const double p = sample_beta(spec.null_shape, rng);
      const auto k = sample_binomial(m_tilde, p, rng);
      if (static_cast<double>(k) <= threshold) ++inside;
    }
    cppp[o] = static_cast<double>(inside) / static_cast<double>(r);
  });

  const double n = static_cast<double>(n_outer);
  double mean = 0.0;
  for (double v : cppp) mean += v;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : cppp) {
    const double d = v - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const double var = m2 / (n - 1.0);
  m4 /= n;
  const double pop_var = m2 / n;

  SimulationMoments out;
  out.n_outer = n_outer;
  out.mean = mean;
  out.empirical_bias = mean - spec.cppp_true;
  out.empirical_variance = var;
  out.se_bias = std::sqrt(var / n);
  out.se_variance = std::sqrt(std::max(m4 - pop_var * pop_var, 0.0) / n);
  return out;
}

void write_scenario_csv(std::ostream& out, std::span<const ScenarioRow> rows) {
  out << "m_tilde,r,ppp_y,abs_bias,se,rmse\n";
  out.precision(12);
  for (const auto& row : rows)
    out << row.m_tilde << ',' << row.r << ',' << row.ppp_y << ',' << row.abs_bias << ',' << row.se << ',' << row.rmse
        << '\n';
}

void write_fixed_m_csv(std::ostream& out, std::span<const ScenarioRow> rows) {
  out << "m_tilde,r,abs_bias,se,rmse\n";
  out.precision(12);
  for (const auto& row : rows)
    out << row.m_tilde << ',' << row.r << ',' << row.abs_bias << ',' << row.se << ',' << row.rmse << '\n';
}

}  // namespace cpppkit
