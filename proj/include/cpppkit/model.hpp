#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cpppkit/capture_histories.hpp"
#include "cpppkit/random.hpp"

namespace cpppkit {

/// Parameter vector θ on the sampler's (unconstrained) scale. Names live on the model.
using ParamPoint = std::vector<double>;
using ParamView = std::span<const double>;

/// Observed or simulated data. The payload is either a real vector (normal
/// models) or a capture-history matrix.
class Dataset {
public:
  using Payload = std::variant<std::vector<double>, CaptureHistories>;

  explicit Dataset(std::vector<double> values);
  explicit Dataset(CaptureHistories histories);

  [[nodiscard]] const Payload& payload() const noexcept { return payload_; }
  [[nodiscard]] const std::vector<double>* reals() const noexcept { return std::get_if<std::vector<double>>(&payload_); }
  [[nodiscard]] const CaptureHistories* captures() const noexcept { return std::get_if<CaptureHistories>(&payload_); }

  /// Number of observations (values, or individuals for capture histories).
  [[nodiscard]] std::size_t size() const noexcept;
  /// Payload kind and dimensions agree.
  [[nodiscard]] bool same_shape(const Dataset& other) const noexcept;
  /// FNV-1a over the payload bytes.
  [[nodiscard]] std::uint64_t digest() const noexcept;

private:
  Payload payload_;
};

/// What a Bayesian model must provide to be checked.
///
/// Implementations are immutable after construction; replicate workers call
/// them concurrently.
class Model {
public:
  virtual ~Model() = default;

  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual std::vector<std::string> parameter_names() const = 0;
  [[nodiscard]] std::size_t dimension() const { return parameter_names().size(); }

  /// log p(θ | data) up to an additive constant, including any Jacobian of
  /// the unconstrained parametrization.
  [[nodiscard]] virtual double log_posterior(ParamView theta, const Dataset& data) const = 0;

  /// Draw y* ~ p(y* | θ). `design` supplies the fixed design (sample size,
  /// release schedule) and is usually the dataset being analysed.
  [[nodiscard]] virtual Dataset simulate_predictive(ParamView theta, const Dataset& design,
                                                    RandomStream& rng) const = 0;

  [[nodiscard]] virtual double discrepancy(const Dataset& data, ParamView theta) const = 0;

  [[nodiscard]] virtual ParamPoint initial_point(const Dataset& data) const = 0;

  /// Starting random-walk scales before adaptation.
  [[nodiscard]] virtual std::vector<double> initial_scales(const Dataset& data) const;
};

enum class DeltaSource { real_data, replicate };

/// Δ_i = D(y*_i, θ_i) - D(y, θ_i) in MCMC iteration order.
class DeltaSeries {
public:
  DeltaSeries(std::vector<double> deltas, DeltaSource source);

  [[nodiscard]] std::span<const double> values() const noexcept { return deltas_; }
  [[nodiscard]] std::size_t size() const noexcept { return deltas_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return deltas_[i]; }
  [[nodiscard]] DeltaSource source() const noexcept { return source_; }

private:
  std::vector<double> deltas_;
  DeltaSource source_;
};

/// D(y*, θ) - D(y, θ). Non-finite discrepancies raise NumericError tagged with `index`.
double delta(const Dataset& y_star, ParamView theta, const Dataset& y, const Model& model,
             std::optional<std::size_t> index = std::nullopt);

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> messages;
};

/// Smoke-checks a model against a dataset without throwing: finite log
/// posterior at the initial point, dimension agreement, and a
/// simulate -> discrepancy round trip.
ValidationReport validate_model(const Model& model, const Dataset& data, RandomStream& rng);

}  // namespace cpppkit
