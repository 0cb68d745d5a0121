#include "cpppkit/models/cjs.hpp"

#include <cmath>
#include <limits>

#include "cpppkit/errors.hpp"

namespace cpppkit {

namespace {

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

double softplus(double u) { return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u)); }

/// log of the density of σ(u) for u ~ logit(Uniform(0, 1)).
double log_logit_jacobian(double u) { return -softplus(-u) - softplus(u); }

std::vector<double> expand_one(const std::vector<double>& v, std::size_t n, const char* what, bool allow_bounds) {
  if (v.size() != 1 && v.size() != n)
    throw DomainError(std::string(what) + " must have 1 or " + std::to_string(n) + " entries");
  std::vector<double> out = v.size() == 1 ? std::vector<double>(n, v[0]) : v;
  for (double x : out) {
    const bool ok = allow_bounds ? (x >= 0.0 && x <= 1.0) : (x > 0.0 && x < 1.0);
    if (!ok) throw DomainError(std::string(what) + " values must be probabilities");
  }
  return out;
}

}  // namespace

CJSParams expand_params(const CJSParams& params, std::size_t occasions, bool allow_bounds) {
  if (occasions < 2) throw DomainError("CJS needs at least two occasions");
  return {expand_one(params.phi, occasions - 1, "phi", allow_bounds),
          expand_one(params.p, occasions - 1, "p", allow_bounds)};
}

double cjs_log_likelihood(const CJSParams& params, const CaptureHistories& data) {
  const auto k = data.occasions();
  const auto full = expand_params(params, k);
  double total = 0.0;
  for (std::size_t i = 0; i < data.individuals(); ++i) {
    double alive = 1.0;
    double dead = 0.0;
    for (std::size_t t = data.first_capture(i) + 1; t < k; ++t) {
      const double phi = full.phi[t - 1];
      const double p = full.p[t - 1];
      double next_alive = alive * phi;
      double next_dead = dead + alive * (1.0 - phi);
      if (data.seen(i, t)) {
        next_alive *= p;
        next_dead = 0.0;
      } else {
        next_alive *= 1.0 - p;
      }
      alive = next_alive;
      dead = next_dead;
    }
    total += std::log(alive + dead);
  }
  return total;
}

std::vector<double> recapture_probabilities(const CJSParams& params, std::size_t occasions) {
  const auto full = expand_params(params, occasions);
  const auto k = occasions;
  std::vector<double> q((k - 1) * k, 0.0);
  for (std::size_t s = 0; s + 1 < k; ++s) {
    double missed = 1.0;  // Π φ_u (1 - p_u) over the occasions skipped so far
    for (std::size_t t = s + 1; t < k; ++t) {
      q[s * k + t] = missed * full.phi[t - 1] * full.p[t - 1];
      missed *= full.phi[t - 1] * (1.0 - full.p[t - 1]);
    }
  }
  return q;
}

std::vector<double> never_seen_probabilities(const CJSParams& params, std::size_t occasions) {
  const auto full = expand_params(params, occasions);
  const auto k = occasions;
  std::vector<double> chi(k - 1);
  double next = 1.0;  // χ at occasion k-1 (last)
  for (std::size_t s = k - 1; s-- > 0;) {
    chi[s] = (1.0 - full.phi[s]) + full.phi[s] * (1.0 - full.p[s]) * next;
    next = chi[s];
  }
  return chi;
}

double cjs_marray_log_likelihood(const CJSParams& params, const MArray& marray) {
  const auto k = marray.occasions;
  const auto q = recapture_probabilities(params, k);
  const auto chi = never_seen_probabilities(params, k);
  double total = 0.0;
  auto add = [&total](std::int64_t count, double prob) {
    if (count == 0) return;
    total += static_cast<double>(count) * std::log(prob);
  };
  for (std::size_t s = 0; s + 1 < k; ++s) {
    for (std::size_t t = s + 1; t < k; ++t) add(marray.z(s, t), q[s * k + t]);
    add(marray.never_seen[s], chi[s]);
  }
  return total;
}

std::vector<double> expected_marray(const CJSParams& params, std::span<const std::int64_t> releases) {
  const auto k = releases.size() + 1;
  auto e = recapture_probabilities(params, k);
  for (std::size_t s = 0; s + 1 < k; ++s)
    for (std::size_t t = s + 1; t < k; ++t) e[s * k + t] *= static_cast<double>(releases[s]);
  return e;
}

double freeman_tukey(const MArray& observed, std::span<const double> expected) {
  const auto k = observed.occasions;
  if (expected.size() != (k - 1) * k) throw DomainError("expected m-array has the wrong shape");
  double out = 0.0;
  for (std::size_t s = 0; s + 1 < k; ++s) {
    for (std::size_t t = s + 1; t < k; ++t) {
      const double d = std::sqrt(static_cast<double>(observed.z(s, t))) - std::sqrt(expected[s * k + t]);
      out += d * d;
    }
  }
  return out;
}

CaptureHistories cjs_simulate(const CJSParams& params, std::span<const std::int64_t> schedule,
                              std::size_t occasions, RandomStream& rng) {
  const auto full = expand_params(params, occasions);
  if (schedule.size() != occasions) throw DomainError("release schedule needs one entry per occasion");
  std::vector<std::uint8_t> cells;
  for (std::size_t s = 0; s < occasions; ++s) {
    if (schedule[s] < 0) throw DomainError("release counts must be non-negative");
    for (std::int64_t a = 0; a < schedule[s]; ++a) {
      const auto row = cells.size();
      cells.resize(row + occasions, 0);
      cells[row + s] = 1;
      bool alive = true;
      for (std::size_t t = s + 1; t < occasions && alive; ++t) {
        alive = rng.uniform() < full.phi[t - 1];
        if (alive && rng.uniform() < full.p[t - 1]) cells[row + t] = 1;
      }
    }
  }
  return CaptureHistories(occasions, std::move(cells));
}

CjsModel::CjsModel(CjsVariant variant, std::size_t occasions) : variant_(variant), k_(occasions) {
  if (k_ < 2) throw DomainError("CJS needs at least two occasions");
}

std::string CjsModel::name() const { return variant_ == CjsVariant::constant ? "cjs_cc" : "cjs_tt"; }

std::vector<std::string> CjsModel::parameter_names() const {
  if (variant_ == CjsVariant::constant) return {"logit_phi", "logit_p"};
  std::vector<std::string> names;
  for (std::size_t t = 1; t < k_; ++t) names.push_back("logit_phi_" + std::to_string(t));
  for (std::size_t t = 2; t <= k_; ++t) names.push_back("logit_p_" + std::to_string(t));
  return names;
}

CJSParams CjsModel::to_params(ParamView theta) const {
  const std::size_t half = theta.size() / 2;
  CJSParams out;
  for (std::size_t i = 0; i < half; ++i) out.phi.push_back(sigmoid(theta[i]));
  for (std::size_t i = half; i < theta.size(); ++i) out.p.push_back(sigmoid(theta[i]));
  return out;
}

ParamPoint CjsModel::from_params(const CJSParams& params) const {
  auto logit = [](double x) { return std::log(x / (1.0 - x)); };
  const auto full = expand_params(params, k_, false);
  ParamPoint theta;
  if (variant_ == CjsVariant::constant) {
    if (params.phi.size() != 1 || params.p.size() != 1) throw DomainError("C/C model takes tied parameters");
    return {logit(params.phi[0]), logit(params.p[0])};
  }
  for (double v : full.phi) theta.push_back(logit(v));
  for (double v : full.p) theta.push_back(logit(v));
  return theta;
}

const CaptureHistories& CjsModel::histories_of(const Dataset& data) const {
  const auto* c = data.captures();
  if (c == nullptr) throw DomainError("CJS model needs capture histories");
  if (c->occasions() != k_) throw DomainError("capture histories have the wrong number of occasions");
  return *c;
}

double CjsModel::log_posterior(ParamView theta, const Dataset& data) const {
  double lp = cjs_marray_log_likelihood(to_params(theta), histories_of(data).marray());
  for (double u : theta) lp += log_logit_jacobian(u);
  return std::isnan(lp) ? -std::numeric_limits<double>::infinity() : lp;
}

Dataset CjsModel::simulate_predictive(ParamView theta, const Dataset& design, RandomStream& rng) const {
  const auto schedule = histories_of(design).release_schedule();
  return Dataset(cjs_simulate(to_params(theta), schedule, k_, rng));
}

double CjsModel::discrepancy(const Dataset& data, ParamView theta) const {
  const auto& marray = histories_of(data).marray();
  return freeman_tukey(marray, expected_marray(to_params(theta), marray.releases));
}

ParamPoint CjsModel::initial_point(const Dataset& data) const {
  (void)histories_of(data);
  const std::size_t per = variant_ == CjsVariant::constant ? 1 : k_ - 1;
  ParamPoint theta(2 * per, 0.0);
  for (std::size_t i = 0; i < per; ++i) {
    theta[i] = std::log(0.6 / 0.4);
    theta[per + i] = std::log(0.8 / 0.2);
  }
  return theta;
}

std::vector<double> CjsModel::initial_scales(const Dataset& data) const {
  return std::vector<double>(initial_point(data).size(), 0.3);
}

}  // namespace cpppkit
