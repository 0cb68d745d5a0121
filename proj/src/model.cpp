#include "cpppkit/model.hpp"

#include <cmath>
#include <cstring>
#include <exception>

#include "cpppkit/errors.hpp"

namespace cpppkit {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

}  // namespace

Dataset::Dataset(std::vector<double> values) : payload_(std::move(values)) {
  if (reals()->empty()) throw DomainError("dataset must not be empty");
}

Dataset::Dataset(CaptureHistories histories) : payload_(std::move(histories)) {}

std::size_t Dataset::size() const noexcept {
  if (const auto* v = reals()) return v->size();
  return captures()->individuals();
}

bool Dataset::same_shape(const Dataset& other) const noexcept {
  if (payload_.index() != other.payload_.index()) return false;
  if (const auto* v = reals()) return v->size() == other.reals()->size();
  return captures()->individuals() == other.captures()->individuals() &&
         captures()->occasions() == other.captures()->occasions();
}

std::uint64_t Dataset::digest() const noexcept {
  std::uint64_t h = kFnvOffset;
  if (const auto* v = reals()) return fnv1a(h, v->data(), v->size() * sizeof(double));
  const auto& c = *captures();
  const std::uint64_t k = c.occasions();
  h = fnv1a(h, &k, sizeof k);
  return fnv1a(h, c.cells().data(), c.cells().size());
}

std::vector<double> Model::initial_scales(const Dataset&) const { return std::vector<double>(dimension(), 0.1); }

DeltaSeries::DeltaSeries(std::vector<double> deltas, DeltaSource source) : deltas_(std::move(deltas)), source_(source) {
  if (deltas_.empty()) throw DomainError("delta series must not be empty");
  for (std::size_t i = 0; i < deltas_.size(); ++i)
    if (!std::isfinite(deltas_[i])) throw NumericError("non-finite discrepancy difference", i);
}

double delta(const Dataset& y_star, ParamView theta, const Dataset& y, const Model& model,
             std::optional<std::size_t> index) {
  const double d_star = model.discrepancy(y_star, theta);
  const double d_obs = model.discrepancy(y, theta);
  const double out = d_star - d_obs;
  if (!std::isfinite(out)) throw NumericError("discrepancy evaluation is not finite", index);
  return out;
}

ValidationReport validate_model(const Model& model, const Dataset& data, RandomStream& rng) {
  ValidationReport report;
  auto fail = [&](std::string msg) {
    report.ok = false;
    report.messages.push_back(std::move(msg));
  };

  ParamPoint init;
  try {
    init = model.initial_point(data);
  } catch (const std::exception& e) {
    fail(std::string("initial_point threw: ") + e.what());
    return report;
  }
  if (init.size() != model.dimension())
    fail("initial point has " + std::to_string(init.size()) + " entries, model declares " +
         std::to_string(model.dimension()));
  for (double v : init)
    if (!std::isfinite(v)) fail("initial point has a non-finite entry");
  if (!report.ok) return report;

  try {
    const double lp = model.log_posterior(init, data);
    if (!std::isfinite(lp)) fail("log posterior is not finite at the initial point");
  } catch (const std::exception& e) {
    fail(std::string("log_posterior threw: ") + e.what());
  }

  try {
    const Dataset sim = model.simulate_predictive(init, data, rng);
    if (!sim.same_shape(data)) {
      fail("simulated dataset does not match the shape of the observed data");
    } else {
      (void)delta(sim, init, data, model);
    }
  } catch (const std::exception& e) {
    fail(std::string("simulate/discrepancy round trip failed: ") + e.what());
  }

  if (report.ok) report.messages.emplace_back("all checks passed");
  return report;
}

}  // namespace cpppkit
