#include "cpppkit/calibration.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "cpppkit/errors.hpp"
#include "cpppkit/uncertainty.hpp"

namespace cpppkit {

namespace {

constexpr std::size_t kExtension = 100;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

void validate_plan(const CalibrationPlan& plan) {
  if (plan.r < 1) throw DomainError("calibration needs r >= 1");
  if (plan.execution.workers < 1) throw DomainError("workers must be >= 1");
  if (!(plan.tau_buffer >= 1.0)) throw DomainError("tau_buffer must be >= 1");
  if (const auto* fixed = std::get_if<FixedLength>(&plan.policy)) {
    if (fixed->m_tilde < 10) throw DomainError("fixed replicate chain length must be >= 10");
  } else {
    const auto& ess = std::get<EssTarget>(plan.policy);
    if (!(ess.target > 0.0)) throw DomainError("ESS target must be positive");
    if (ess.max_iterations != 0 && static_cast<double>(ess.max_iterations) < ess.target)
      throw DomainError("ESS target exceeds the iteration cap");
  }
}

std::vector<std::size_t> select_replicate_indices(std::size_t m, std::size_t r, Thinning thinning, RandomStream& rng) {
  if (r == 0) throw DomainError("r must be >= 1");
  if (r > m) throw DomainError("cannot draw " + std::to_string(r) + " replicates from " + std::to_string(m) + " pairs");
  std::vector<std::size_t> idx;
  idx.reserve(r);
  if (thinning == Thinning::systematic) {
    const double step = static_cast<double>(m) / static_cast<double>(r);
    for (std::size_t i = 1; i <= r; ++i)
      idx.push_back(static_cast<std::size_t>(std::llround(static_cast<double>(i) * step)) - 1);
  } else {
    std::vector<std::size_t> all(m);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::sample(all.begin(), all.end(), std::back_inserter(idx), static_cast<std::ptrdiff_t>(r), rng);
  }
  return idx;
}

std::vector<CalibrationDraw> draw_calibration_replicates(std::span<const Dataset> y_star, const PosteriorChain& chain,
                                                         std::size_t r, Thinning thinning, RandomStream& rng) {
  if (y_star.size() != chain.size()) throw DomainError("S2 datasets and chain draws differ in length");
  const auto idx = select_replicate_indices(y_star.size(), r, thinning, rng);
  std::vector<CalibrationDraw> out;
  out.reserve(idx.size());
  for (auto i : idx) {
    const auto th = chain.draw(i);
    out.push_back({i, y_star[i], ParamPoint(th.begin(), th.end())});
  }
  return out;
}

ReplicateResult run_replicate(const Model& model, const Dataset& data, const ParamPoint& theta,
                              const ChainLengthPolicy& policy, const std::vector<double>& scales, RandomStream& rng) {
  RandomWalkSampler sampler(model, data, theta, scales);
  std::vector<double> deltas;
  auto advance = [&](std::size_t steps) {
    for (std::size_t s = 0; s < steps; ++s) {
      sampler.sweep(rng);
      const auto th = sampler.current();
      const Dataset y_star = model.simulate_predictive(th, data, rng);
      deltas.push_back(delta(y_star, th, data, model, deltas.size()));
    }
  };
  auto own_ess = [&] {
    std::vector<std::uint8_t> bits(deltas.size());
    std::transform(deltas.begin(), deltas.end(), bits.begin(), [](double d) { return d >= 0.0 ? 1 : 0; });
    return ess_batch_means(std::span<const std::uint8_t>(bits)).ess;
  };

  ReplicateResult res;
  if (const auto* fixed = std::get_if<FixedLength>(&policy)) {
    deltas.reserve(fixed->m_tilde);
    advance(fixed->m_tilde);
    if (deltas.size() >= 10) res.ess_hat = own_ess();
  } else {
    const auto& target = std::get<EssTarget>(policy);
    if (target.max_iterations == 0) throw DomainError("ESS-target policy needs a resolved iteration cap");
    double ess = 0.0;
    while (deltas.size() < target.max_iterations) {
      advance(std::min(kExtension, target.max_iterations - deltas.size()));
      if (deltas.size() < 10) continue;
      ess = own_ess();
      if (ess >= target.target) break;
    }
    res.ess_hat = ess;
    res.ess_short = ess < target.target;
  }

  res.generating_theta = theta;
  res.data_digest = data.digest();
  res.m_tilde = static_cast<std::int64_t>(deltas.size());
  res.k_tilde = std::count_if(deltas.begin(), deltas.end(), [](double d) { return d >= 0.0; });
  res.ppp_hat = (static_cast<double>(res.k_tilde) + 0.5) / (static_cast<double>(res.m_tilde) + 1.0);
  res.deltas = std::move(deltas);
  res.stream_id = rng.stream_id();
  return res;
}

std::vector<ReplicateResult> run_replicates(const Model& model, std::span<const CalibrationDraw> draws,
                                            const ChainLengthPolicy& policy, const std::vector<double>& scales,
                                            std::uint64_t master_seed, Execution exec) {
  std::vector<ReplicateResult> results(draws.size());
  for_each_index(draws.size(), exec, [&](std::size_t j) {
    RandomStream rng(master_seed, stream_id(StreamPurpose::replicate, j));
    try {
      results[j] = run_replicate(model, draws[j].data, draws[j].theta, policy, scales, rng);
    } catch (const std::exception& e) {
      throw NumericError(std::string("calibration replicate failed: ") + e.what(), j);
    }
    results[j].j = j;
  });
  return results;
}

double cppp_hat(std::span<const ReplicateResult> results, double ppp_y) {
  if (results.empty()) throw DomainError("cppp needs at least one replicate");
  if (!(ppp_y >= 0.0 && ppp_y <= 1.0)) throw DomainError("ppp_y must lie in [0, 1]");
  std::size_t inside = 0;
  for (const auto& res : results)
    if (static_cast<double>(res.k_tilde) <= static_cast<double>(res.m_tilde) * ppp_y) ++inside;
  return static_cast<double>(inside) / static_cast<double>(results.size());
}

RealChainRun run_real_chain(const Model& model, const Dataset& data, const RealChainConfig& config,
                            std::uint64_t master_seed, std::span<const std::size_t> keep) {
  ChainSpec spec;
  spec.n_iterations = config.m;
  spec.burn_in = config.burn_in;
  spec.proposal_scales = model.initial_scales(data);
  spec.adapt = true;
  const auto init = model.initial_point(data);

  if (config.mixing == Mixing::bad) {
    if (!(config.bad_mixing_factor > 0.0)) throw DomainError("bad_mixing_factor must be positive");
    // Tune a good-mixing sampler first, then detune it.
    RandomStream pilot_rng(master_seed, stream_id(StreamPurpose::real_chain, 1));
    RandomWalkSampler pilot(model, data, init, spec.proposal_scales);
    const std::size_t pilot_sweeps = std::max<std::size_t>(config.burn_in, 1000);
    for (std::size_t t = 0; t < pilot_sweeps; ++t) {
      pilot.sweep(pilot_rng);
      pilot.adapt(t, spec.adapt_target_rate);
    }
    spec.proposal_scales = pilot.scales();
    for (auto& s : spec.proposal_scales) s *= config.bad_mixing_factor;
    spec.adapt = false;
  }

  RandomStream chain_rng(master_seed, stream_id(StreamPurpose::real_chain, 0));
  auto chain = run_rw_metropolis(model, data, init, spec, chain_rng);

  RandomStream pred_rng(master_seed, stream_id(StreamPurpose::predictive, 0));
  std::vector<Dataset> kept;
  kept.reserve(keep.size());
  auto deltas = posterior_predictive_stream(model, chain, data, pred_rng, keep, &kept);
  auto ppp = estimate_ppp(deltas, PppVariant::plain);
  return RealChainRun{std::move(chain), std::move(deltas), ppp, std::vector<std::size_t>(keep.begin(), keep.end()),
                      std::move(kept)};
}

CpppEstimate orchestrate(const Model& model, const Dataset& data, const RealChainConfig& real,
                         const CalibrationPlan& plan) {
  validate_plan(plan);
  if (real.m < 1000) throw DomainError("the real-data chain needs m >= 1000 for the transfer estimator");
  const auto start = std::chrono::steady_clock::now();

  RandomStream select_rng(plan.master_seed, stream_id(StreamPurpose::selection, 0));
  const auto indices = select_replicate_indices(real.m, plan.r, plan.thinning, select_rng);
  auto run = run_real_chain(model, data, real, plan.master_seed, indices);
  const double real_seconds = seconds_since(start);

  std::vector<CalibrationDraw> draws;
  draws.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto th = run.chain.draw(indices[i]);
    draws.push_back({indices[i], std::move(run.kept[i]), ParamPoint(th.begin(), th.end())});
  }

  const TransferTable table(run.deltas, plan.tau_buffer);
  ChainLengthPolicy policy = plan.policy;
  if (auto* ess = std::get_if<EssTarget>(&policy); ess != nullptr && ess->max_iterations == 0) {
    const double cap = std::ceil(10.0 * ess->target * table.tau(0.5));
    ess->max_iterations = static_cast<std::size_t>(std::max(cap, ess->target));
  }

  CpppEstimate est;
  est.replicate_scales = run.chain.final_scales;
  est.replicates = run_replicates(model, draws, policy, est.replicate_scales, plan.master_seed, plan.execution);
  assign_transfer_tau(est.replicates, table);

  est.plan = plan;
  est.plan.policy = policy;
  est.real_config = real;
  est.r = plan.r;
  est.ppp_y = run.ppp.value;
  est.real_ppp = run.ppp;
  est.real_deltas.assign(run.deltas.values().begin(), run.deltas.values().end());
  est.real_acceptance_rate = run.chain.acceptance_rate;
  est.value = cppp_hat(est.replicates, est.ppp_y);
  est.real_seconds = real_seconds;
  est.seconds = seconds_since(start);
  return est;
}

double cost_model(double r, double m_tilde, double m, double t_ppp_seconds) {
  if (!(r > 0 && m_tilde > 0 && m > 0 && t_ppp_seconds > 0)) throw DomainError("cost model inputs must be positive");
  return r * m_tilde / m * t_ppp_seconds;
}

}  // namespace cpppkit
