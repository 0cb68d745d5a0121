#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "cpppkit/calibration.hpp"
#include "cpppkit/errors.hpp"
#include "cpppkit/io.hpp"
#include "cpppkit/models/newcomb.hpp"
#include "cpppkit/results.hpp"
#include "cpppkit/uncertainty.hpp"
#include "toy_models.hpp"

using namespace cpppkit;

namespace {

Dataset newcomb_data() { return Dataset(load_real_vector(std::string(CPPPKIT_DATA_DIR) + "/newcomb.txt")); }

std::string cppp_document(const CpppEstimate& est) {
  std::ostringstream out;
  write_cppp_json(out, est, {}, {}, RuntimeInfo{});
  std::ostringstream csv;
  write_replicate_csv(csv, est.replicates);
  return out.str() + csv.str();
}

class NanDiscrepancy final : public Model {
public:
  std::string name() const override { return "nan"; }
  std::vector<std::string> parameter_names() const override { return {"x"}; }
  double log_posterior(ParamView theta, const Dataset&) const override { return -0.5 * theta[0] * theta[0]; }
  Dataset simulate_predictive(ParamView, const Dataset& d, RandomStream&) const override { return d; }
  double discrepancy(const Dataset&, ParamView) const override { return std::nan(""); }
  ParamPoint initial_point(const Dataset&) const override { return {0.0}; }
};

}  // namespace

TEST_CASE("systematic and random replicate selection", "[calibration]") {
  RandomStream rng(1, 0);
  CHECK(select_replicate_indices(10, 5, Thinning::systematic, rng) == std::vector<std::size_t>{1, 3, 5, 7, 9});
  CHECK(select_replicate_indices(10, 3, Thinning::systematic, rng) == std::vector<std::size_t>{2, 6, 9});
  CHECK(select_replicate_indices(4, 4, Thinning::systematic, rng) == std::vector<std::size_t>{0, 1, 2, 3});
  const auto idx = select_replicate_indices(1000, 50, Thinning::random, rng);
  REQUIRE(idx.size() == 50);
  for (std::size_t i = 1; i < idx.size(); ++i) CHECK(idx[i] > idx[i - 1]);
  CHECK(idx.back() < 1000);
  CHECK_THROWS_AS(select_replicate_indices(10, 11, Thinning::systematic, rng), DomainError);
}

TEST_CASE("cppp counts replicates at or below the observed ppp", "[calibration]") {
  std::vector<ReplicateResult> res(4);
  const std::int64_t k[] = {2, 3, 4, 9};
  for (std::size_t j = 0; j < 4; ++j) {
    res[j].m_tilde = 10;
    res[j].k_tilde = k[j];
  }
  CHECK(cppp_hat(res, 0.3) == 0.5);
  CHECK(cppp_hat(res, 0.0) == 0.0);
  CHECK(cppp_hat(res, 1.0) == 1.0);
  CHECK_THROWS_AS(cppp_hat(std::vector<ReplicateResult>{}, 0.3), DomainError);
}

TEST_CASE("replicate chain length policies", "[calibration]") {
  const NewcombModel model;
  const auto data = newcomb_data();
  const auto theta = model.initial_point(data);
  const auto scales = model.initial_scales(data);
  RandomStream rng(2, 0);
  const auto fixed = run_replicate(model, data, theta, FixedLength{150}, scales, rng);
  CHECK(fixed.m_tilde == 150);
  CHECK(fixed.deltas.size() == 150);
  CHECK(fixed.ppp_hat == (fixed.k_tilde + 0.5) / 151.0);
  CHECK(fixed.generating_theta == theta);

  const auto grown = run_replicate(model, data, theta, EssTarget{150, 5000}, scales, rng);
  CHECK(grown.m_tilde % 100 == 0);
  CHECK(grown.ess_hat >= 150.0);
  CHECK_FALSE(grown.ess_short);

  const auto capped = run_replicate(model, data, theta, EssTarget{150, 160}, scales, rng);
  CHECK(capped.m_tilde == 160);
  CHECK(capped.ess_short);
  CHECK_THROWS_AS(run_replicate(model, data, theta, EssTarget{150, 0}, scales, rng), DomainError);
}

TEST_CASE("replicate failures carry the replicate index", "[calibration]") {
  const NanDiscrepancy model;
  const Dataset data(std::vector<double>{1.0});
  std::vector<CalibrationDraw> draws{{0, data, {0.0}}, {1, data, {0.0}}};
  try {
    (void)run_replicates(model, draws, FixedLength{20}, {1.0}, 1, {});
    FAIL("expected a NumericError");
  } catch (const NumericError& e) {
    REQUIRE(e.index().has_value());
    CHECK(*e.index() == 0);
  }
}

TEST_CASE("orchestrate output does not depend on workers or backend", "[calibration]") {
  const NewcombModel model;
  const auto data = newcomb_data();
  RealChainConfig real;
  real.m = 1000;
  real.burn_in = 500;
  CalibrationPlan plan;
  plan.r = 24;
  plan.policy = FixedLength{60};
  plan.master_seed = 99;

  plan.execution = {Backend::serial, 1};
  const auto reference = orchestrate(model, data, real, plan);
  const auto ref_doc = cppp_document(reference);
  for (int workers : {2, 3, 8}) {
    plan.execution = {Backend::openmp, workers};
    const auto est = orchestrate(model, data, real, plan);
    CHECK(cppp_document(est) == ref_doc);
    for (std::size_t j = 0; j < est.replicates.size(); ++j) CHECK(est.replicates[j].deltas == reference.replicates[j].deltas);
  }
  plan.policy = EssTarget{50, 0};
  plan.execution = {Backend::serial, 1};
  const auto ess_serial = cppp_document(orchestrate(model, data, real, plan));
  plan.execution = {Backend::openmp, 4};
  CHECK(cppp_document(orchestrate(model, data, real, plan)) == ess_serial);
}

TEST_CASE("orchestrate bookkeeping", "[calibration]") {
  const NewcombModel model;
  const auto data = newcomb_data();
  RealChainConfig real;
  real.m = 1000;
  CalibrationPlan plan;
  plan.r = 10;
  plan.policy = FixedLength{40};
  const auto est = orchestrate(model, data, real, plan);
  CHECK(est.replicates.size() == 10);
  CHECK(est.ppp_y == est.real_ppp.value);
  CHECK(est.value == cppp_hat(est.replicates, est.ppp_y));
  CHECK(est.real_deltas.size() == 1000);
  for (const auto& r : est.replicates) {
    CHECK(r.m_tilde == 40);
    CHECK(r.tau_hat >= 1.0);
  }
  real.m = 999;
  CHECK_THROWS_AS(orchestrate(model, data, real, plan), DomainError);
}

TEST_CASE("bad mixing lowers the real-chain ESS", "[calibration]") {
  const NewcombModel model;
  const auto data = newcomb_data();
  RealChainConfig good;
  good.m = 20000;
  RealChainConfig bad = good;
  bad.mixing = Mixing::bad;
  const auto g = run_real_chain(model, data, good, 7);
  const auto b = run_real_chain(model, data, bad, 7);
  const double ratio = g.ppp.ess / b.ppp.ess;
  CHECK(ratio > 3.0);
  CHECK(ratio < 8.0);
  CHECK(b.chain.acceptance_rate < g.chain.acceptance_rate);
}

TEST_CASE("plan validation and cost model", "[calibration]") {
  CalibrationPlan plan;
  plan.r = 0;
  CHECK_THROWS_AS(validate_plan(plan), DomainError);
  plan.r = 10;
  plan.policy = FixedLength{5};
  CHECK_THROWS_AS(validate_plan(plan), DomainError);
  plan.policy = EssTarget{100, 50};
  CHECK_THROWS_AS(validate_plan(plan), DomainError);
  plan.policy = FixedLength{100};
  plan.tau_buffer = 0.5;
  CHECK_THROWS_AS(validate_plan(plan), DomainError);
  CHECK(cost_model(100, 1000, 10000, 2.0) == 20.0);
  CHECK_THROWS_AS(cost_model(0, 1000, 10000, 2.0), DomainError);
}
