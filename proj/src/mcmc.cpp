#include "cpppkit/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cpppkit/errors.hpp"

namespace cpppkit {

std::vector<double> PosteriorChain::column(std::size_t d) const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = draws[i * dimension + d];
  return out;
}

RandomWalkSampler::RandomWalkSampler(const Model& model, const Dataset& data, ParamPoint init,
                                     std::vector<double> scales)
    : model_(model), data_(data), theta_(std::move(init)), scales_(std::move(scales)) {
  if (theta_.size() != model_.dimension()) throw DomainError("initial point has the wrong dimension");
  if (scales_.size() != theta_.size()) throw DomainError("one proposal scale per parameter is required");
  for (double s : scales_)
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("proposal scales must be positive and finite");
  log_post_ = model_.log_posterior(theta_, data_);
  if (!std::isfinite(log_post_)) throw DomainError("log posterior is not finite at the initial point");
  last_accept_.assign(theta_.size(), 0);
}

std::size_t RandomWalkSampler::sweep(RandomStream& rng) {
  std::normal_distribution<double> step(0.0, 1.0);
  std::size_t accepted = 0;
  for (std::size_t d = 0; d < theta_.size(); ++d) {
    const double old = theta_[d];
    theta_[d] = old + scales_[d] * step(rng);
    const double proposal = model_.log_posterior(theta_, data_);
    const double log_u = std::log(rng.uniform());
    // NaN proposals fail the comparison and are rejected.
    if (proposal - log_post_ > log_u) {
      log_post_ = proposal;
      last_accept_[d] = 1;
      ++accepted;
    } else {
      theta_[d] = old;
      last_accept_[d] = 0;
    }
  }
  return accepted;
}

void RandomWalkSampler::adapt(std::size_t t, double target) {
  const double gain = std::pow(static_cast<double>(t) + 1.0, -0.6);
  for (std::size_t d = 0; d < scales_.size(); ++d) {
    const double log_s = std::log(scales_[d]) + gain * (static_cast<double>(last_accept_[d]) - target);
    scales_[d] = std::exp(std::clamp(log_s, -30.0, 30.0));
  }
}

PosteriorChain run_rw_metropolis(const Model& model, const Dataset& data, const ParamPoint& init,
                                 const ChainSpec& spec, RandomStream& rng) {
  if (spec.n_iterations == 0) throw DomainError("chain needs at least one retained iteration");
  if (spec.adapt && !(spec.adapt_target_rate > 0.0 && spec.adapt_target_rate < 1.0))
    throw DomainError("adaptation target rate must lie in (0, 1)");

  RandomWalkSampler sampler(model, data, init, spec.proposal_scales);
  for (std::size_t t = 0; t < spec.burn_in; ++t) {
    sampler.sweep(rng);
    if (spec.adapt) sampler.adapt(t, spec.adapt_target_rate);
  }

  PosteriorChain chain;
  chain.dimension = init.size();
  chain.spec = spec;
  chain.seed = rng.seed();
  chain.stream_id = rng.stream_id();
  chain.draws.reserve(spec.n_iterations * chain.dimension);
  chain.accepted.reserve(spec.n_iterations);
  std::size_t total = 0;
  for (std::size_t i = 0; i < spec.n_iterations; ++i) {
    const auto acc = sampler.sweep(rng);
    total += acc;
    chain.accepted.push_back(static_cast<std::uint8_t>(std::min<std::size_t>(acc, 255)));
    const auto cur = sampler.current();
    chain.draws.insert(chain.draws.end(), cur.begin(), cur.end());
  }
  chain.acceptance_rate = static_cast<double>(total) / static_cast<double>(spec.n_iterations * chain.dimension);
  chain.final_scales = sampler.scales();
  return chain;
}

PosteriorChain run_conjugate_normal(const Dataset& data, std::size_t m, RandomStream& rng) {
  const auto* y = data.reals();
  if (y == nullptr || y->size() < 2) throw DomainError("conjugate normal sampler needs a real vector of length >= 2");
  if (m == 0) throw DomainError("conjugate normal sampler needs m >= 1");
  const double n = static_cast<double>(y->size());
  const double mean = std::accumulate(y->begin(), y->end(), 0.0) / n;
  double ss = 0.0;
  for (double v : *y) ss += (v - mean) * (v - mean);

  std::chi_squared_distribution<double> chi2(n - 1.0);
  std::normal_distribution<double> z(0.0, 1.0);
  PosteriorChain chain;
  chain.dimension = 2;
  chain.seed = rng.seed();
  chain.stream_id = rng.stream_id();
  chain.spec.n_iterations = m;
  chain.acceptance_rate = 1.0;
  chain.draws.reserve(2 * m);
  chain.accepted.assign(m, 2);
  for (std::size_t i = 0; i < m; ++i) {
    const double sigma2 = ss / chi2(rng);
    const double mu = mean + std::sqrt(sigma2 / n) * z(rng);
    chain.draws.push_back(mu);
    chain.draws.push_back(0.5 * std::log(sigma2));
  }
  return chain;
}

DeltaSeries posterior_predictive_stream(const Model& model, const PosteriorChain& chain, const Dataset& data,
                                        RandomStream& rng, std::span<const std::size_t> keep,
                                        std::vector<Dataset>* kept) {
  if (chain.size() == 0) throw DomainError("posterior chain is empty");
  std::vector<double> deltas;
  deltas.reserve(chain.size());
  std::size_t next_keep = 0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto theta = chain.draw(i);
    Dataset y_star = [&] {
      try {
        return model.simulate_predictive(theta, data, rng);
      } catch (const DomainError& e) {
        throw NumericError(std::string("predictive simulation failed: ") + e.what(), i);
      }
    }();
    deltas.push_back(delta(y_star, theta, data, model, i));
    if (kept != nullptr && next_keep < keep.size() && keep[next_keep] == i) {
      kept->push_back(std::move(y_star));
      ++next_keep;
    }
  }
  return DeltaSeries(std::move(deltas), DeltaSource::real_data);
}

void write_chain_csv(std::ostream& out, const PosteriorChain& chain, const std::vector<std::string>& names) {
  out << "iter";
  for (const auto& n : names) out << ',' << n;
  out << ",accepted\n";
  out.precision(17);
  for (std::size_t i = 0; i < chain.size(); ++i) {
    out << i + 1;
    for (double v : chain.draw(i)) out << ',' << v;
    out << ',' << static_cast<int>(chain.accepted[i]) << '\n';
  }
}

}  // namespace cpppkit
