// Serial reference loop vs the OpenMP kernels on the three parallel hot spots.
// Arg 0 is the serial backend; positive args are OpenMP worker counts.

#include <filesystem>

#include <benchmark/benchmark.h>

#include "cpppkit/calibration.hpp"
#include "cpppkit/io.hpp"
#include "cpppkit/models/newcomb.hpp"
#include "cpppkit/scenario.hpp"
#include "cpppkit/uncertainty.hpp"

using namespace cpppkit;

namespace {

Execution exec_of(const benchmark::State& state) {
  const auto workers = static_cast<int>(state.range(0));
  return workers == 0 ? Execution{Backend::serial, 1} : Execution{Backend::openmp, workers};
}

struct Fixture {
  NewcombModel model;
  Dataset data{load_real_vector(std::filesystem::path(CPPPKIT_DATA_DIR) / "newcomb.txt")};
  CpppEstimate est;
  std::vector<CalibrationDraw> draws;

  Fixture() {
    RealChainConfig real;
    real.m = 4000;
    CalibrationPlan plan;
    plan.r = 200;
    plan.policy = FixedLength{100};
    est = orchestrate(model, data, real, plan);
    RandomStream rng(plan.master_seed, stream_id(StreamPurpose::selection, 0));
    const auto indices = select_replicate_indices(real.m, plan.r, plan.thinning, rng);
    auto run = run_real_chain(model, data, real, plan.master_seed, indices);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      const auto th = run.chain.draw(indices[i]);
      draws.push_back({indices[i], std::move(run.kept[i]), ParamPoint(th.begin(), th.end())});
    }
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_run_replicates(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    auto out = run_replicates(f.model, f.draws, FixedLength{100}, f.est.replicate_scales, 1, exec_of(state));
    benchmark::DoNotOptimize(out);
  }
}

void BM_bootstrap_mbb(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    auto v = bootstrap_mbb(f.est.replicates, f.est.ppp_y, 200, 0, 1, exec_of(state));
    benchmark::DoNotOptimize(v);
  }
}

void BM_scenario_simulate(benchmark::State& state) {
  ScenarioSpec spec;
  for (auto _ : state) {
    auto m = scenario_simulate(spec, 50, 100, 2000, 1, exec_of(state));
    benchmark::DoNotOptimize(m);
  }
}

}  // namespace

BENCHMARK(BM_run_replicates)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_bootstrap_mbb)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_scenario_simulate)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
