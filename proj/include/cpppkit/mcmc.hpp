#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "cpppkit/model.hpp"
#include "cpppkit/random.hpp"

namespace cpppkit {

struct ChainSpec {
  std::size_t n_iterations = 1000;  // retained draws
  std::size_t burn_in = 0;
  std::vector<double> proposal_scales;
  bool adapt = false;  // tune scales during burn-in only
  double adapt_target_rate = 0.44;
};

/// Retained draws of a sampler run, row-major (iteration x parameter).
struct PosteriorChain {
  std::size_t dimension = 0;
  std::vector<double> draws;
  std::vector<std::uint8_t> accepted;  // components accepted per retained sweep
  double acceptance_rate = 0.0;
  ChainSpec spec;
  std::vector<double> final_scales;  // scales in force for every retained draw
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  [[nodiscard]] std::size_t size() const noexcept { return dimension == 0 ? 0 : draws.size() / dimension; }
  [[nodiscard]] ParamView draw(std::size_t i) const { return {draws.data() + i * dimension, dimension}; }
  [[nodiscard]] std::vector<double> column(std::size_t d) const;
};

/// Componentwise Gaussian random-walk Metropolis. One `sweep()` updates every
/// coordinate once, in order.
class RandomWalkSampler {
public:
  RandomWalkSampler(const Model& model, const Dataset& data, ParamPoint init, std::vector<double> scales);

  /// Returns the number of coordinates whose proposal was accepted.
  std::size_t sweep(RandomStream& rng);

  /// Robbins-Monro step on log scales toward `target` using the acceptances of
  /// the last sweep; `t` is the 0-based adaptation step.
  void adapt(std::size_t t, double target);

  [[nodiscard]] ParamView current() const noexcept { return theta_; }
  [[nodiscard]] double current_log_posterior() const noexcept { return log_post_; }
  [[nodiscard]] const std::vector<double>& scales() const noexcept { return scales_; }

private:
  const Model& model_;
  const Dataset& data_;
  ParamPoint theta_;
  std::vector<double> scales_;
  std::vector<std::uint8_t> last_accept_;
  double log_post_;
};

PosteriorChain run_rw_metropolis(const Model& model, const Dataset& data, const ParamPoint& init,
                                 const ChainSpec& spec, RandomStream& rng);

/// Exact iid draws of (μ, log σ) for a normal sample under the flat prior on
/// (μ, log σ): σ² | y ~ scaled-Inv-χ²(n-1, s²), μ | σ², y ~ N(ȳ, σ²/n).
PosteriorChain run_conjugate_normal(const Dataset& data, std::size_t m, RandomStream& rng);

/// For each retained θ_i draws y*_i and records Δ_i. When `keep` is given
/// (ascending indices) the matching y*_i are moved into `kept`.
DeltaSeries posterior_predictive_stream(const Model& model, const PosteriorChain& chain, const Dataset& data,
                                        RandomStream& rng, std::span<const std::size_t> keep = {},
                                        std::vector<Dataset>* kept = nullptr);

/// CSV dump: `iter,<names>...,accepted`.
void write_chain_csv(std::ostream& out, const PosteriorChain& chain, const std::vector<std::string>& names);

}  // namespace cpppkit
