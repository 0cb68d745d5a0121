#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cpppkit/capture_histories.hpp"
#include "cpppkit/model.hpp"

namespace cpppkit {

/// Cormack-Jolly-Seber parameters on the probability scale, 0-based:
/// phi[t] is survival from occasion t to t+1, p[t] the capture probability at
/// occasion t+1. A vector of length 1 is a tied (constant) parameter.
struct CJSParams {
  std::vector<double> phi;
  std::vector<double> p;
};

/// Expands tied parameters to length k-1 and checks every value lies in (0, 1]
/// ([0, 1] when `allow_bounds`).
CJSParams expand_params(const CJSParams& params, std::size_t occasions, bool allow_bounds = true);

/// Log-likelihood conditional on first capture, by the two-state
/// (alive/dead) forward algorithm per individual.
double cjs_log_likelihood(const CJSParams& params, const CaptureHistories& data);

/// Multinomial m-array form of the same likelihood.
double cjs_marray_log_likelihood(const CJSParams& params, const MArray& marray);

/// q_st, the probability that an animal released at s is first recaptured at
/// t; (k-1) x k row-major, zero for t <= s.
std::vector<double> recapture_probabilities(const CJSParams& params, std::size_t occasions);

/// Probability that an animal released at s is never seen again, per s.
std::vector<double> never_seen_probabilities(const CJSParams& params, std::size_t occasions);

/// e_st = R_s · q_st, same layout as recapture_probabilities.
std::vector<double> expected_marray(const CJSParams& params, std::span<const std::int64_t> releases);

/// Σ_{s<t} (√z_st - √e_st)².
double freeman_tukey(const MArray& observed, std::span<const double> expected);

/// Forward simulation: schedule[s] animals are first captured at occasion s.
CaptureHistories cjs_simulate(const CJSParams& params, std::span<const std::int64_t> schedule,
                              std::size_t occasions, RandomStream& rng);

enum class CjsVariant {
  constant,        // C/C: one φ, one p
  time_dependent,  // T/T: φ_1..φ_{k-1}, p_2..p_k
};

/// CJS model with uniform priors, sampled on the logit scale, checked with
/// the Freeman-Tukey discrepancy on the m-array. Latent alive states are
/// summed out of the likelihood and only simulated inside simulate_predictive.
class CjsModel final : public Model {
public:
  CjsModel(CjsVariant variant, std::size_t occasions);

  [[nodiscard]] std::string name() const override;
  [[nodiscard]] std::vector<std::string> parameter_names() const override;
  [[nodiscard]] double log_posterior(ParamView theta, const Dataset& data) const override;
  [[nodiscard]] Dataset simulate_predictive(ParamView theta, const Dataset& design, RandomStream& rng) const override;
  [[nodiscard]] double discrepancy(const Dataset& data, ParamView theta) const override;
  [[nodiscard]] ParamPoint initial_point(const Dataset& data) const override;
  [[nodiscard]] std::vector<double> initial_scales(const Dataset& data) const override;

  /// Logit-scale θ to probabilities.
  [[nodiscard]] CJSParams to_params(ParamView theta) const;
  /// Probabilities to logit-scale θ.
  [[nodiscard]] ParamPoint from_params(const CJSParams& params) const;

  [[nodiscard]] CjsVariant variant() const noexcept { return variant_; }
  [[nodiscard]] std::size_t occasions() const noexcept { return k_; }

private:
  const CaptureHistories& histories_of(const Dataset& data) const;

  CjsVariant variant_;
  std::size_t k_;
};

}  // namespace cpppkit
