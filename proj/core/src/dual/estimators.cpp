#include "uzawa/dual/estimators.hpp"

#include "uzawa/core/executor.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace uzawa {

namespace {

/// Best responses of all agents, solved once per distinct response key.
std::vector<std::shared_ptr<const AgentPolicy>> solve_all(const ProblemInstance& p, const PriceSignal& lambda,
                                                          const Executor& ex) {
  const std::size_t n = p.agent_count();
  std::unordered_map<const void*, std::size_t> seen;
  std::vector<std::size_t> rep, slot(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = seen.emplace(p.agents[i]->response_key(), rep.size());
    if (inserted) rep.push_back(i);
    slot[i] = it->second;
  }
  std::vector<std::shared_ptr<const AgentPolicy>> unique(rep.size());
  ex.for_each(rep.size(), [&](std::size_t r) { unique[r] = p.agents[rep[r]]->best_response(lambda); });
  std::vector<std::shared_ptr<const AgentPolicy>> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = unique[slot[i]];
  return out;
}

/// Mean over agents of one realization each, for sample s of the given tag.
struct AgentMeans {
  Eigen::MatrixXd coupling;
  double local = 0.0;
  double paired = 0.0;
};

AgentMeans draw_population(const ProblemInstance& p, const std::vector<std::shared_ptr<const AgentPolicy>>& pol,
                           const PriceSignal& lambda, std::uint64_t seed, StreamTag tag, std::size_t s,
                           std::vector<Realization>& buf) {
  const std::size_t n = p.agent_count();
  AgentMeans out;
  out.coupling = Eigen::MatrixXd::Zero(lambda.values().rows(), lambda.values().cols());
  for (std::size_t i = 0; i < n; ++i) {
    NoiseStream stream(seed, StreamPath{tag, i, s, 0});
    p.agents[i]->simulate(*pol[i], stream, buf[i]);
    out.coupling += buf[i].coupling.values();
    out.local += buf[i].local_cost;
    out.paired += p.pairing(lambda, buf[i].coupling);
  }
  out.coupling /= double(n);
  out.local /= double(n);
  out.paired /= double(n);
  return out;
}

}  // namespace

MeanEstimate estimate_dual_value(const ProblemInstance& problem, const PriceSignal& lambda, std::size_t samples,
                                 std::uint64_t seed, std::size_t workers) {
  problem.validate();
  if (samples == 0) throw std::invalid_argument("dual value: need at least one sample");
  Executor ex(workers);
  const PriceSignal v = problem.aggregate->best_response(lambda);
  const double conj = problem.pairing(lambda, v) - problem.aggregate->cost(v);
  const auto pol = solve_all(problem, lambda, ex);
  std::vector<double> values(samples);
  ex.for_each(samples, [&](std::size_t s) {
    std::vector<Realization> buf(problem.agent_count(), Realization{PriceSignal::zeros_like(lambda), 0.0});
    const AgentMeans m = draw_population(problem, pol, lambda, seed, StreamTag::DualEstimate, s, buf);
    values[s] = m.local + m.paired;
  });
  for (double x : values) {
    if (!std::isfinite(x)) throw std::runtime_error("dual value: non-finite local cost");
  }
  MeanEstimate e = mean_with_ci(values);
  e.mean -= conj;
  return e;
}

GapEstimate estimate_gap(const ProblemInstance& problem, const PriceSignal& lambda, std::uint64_t seed,
                         const GapOptions& opt) {
  problem.validate();
  if (opt.samples == 0) throw std::invalid_argument("gap: need at least one sample");
  Executor ex(opt.workers);
  const std::size_t n = problem.agent_count();
  const auto pol = solve_all(problem, lambda, ex);

  GapEstimate g;
  g.samples = opt.samples;
  g.exact_mean = true;
  for (const auto& a : problem.agents) g.exact_mean = g.exact_mean && a->has_exact_expectation();

  PriceSignal mean_agg = PriceSignal::zeros_like(lambda);
  if (g.exact_mean) {
    for (std::size_t i = 0; i < n; ++i) mean_agg.values() += problem.agents[i]->expected_coupling(*pol[i]).values();
    mean_agg.values() /= double(n);
  } else {
    if (opt.mean_samples == 0) throw std::invalid_argument("gap: need mean samples without exact expectations");
    std::vector<Eigen::MatrixXd> parts(opt.mean_samples);
    ex.for_each(opt.mean_samples, [&](std::size_t s) {
      std::vector<Realization> buf(n, Realization{PriceSignal::zeros_like(lambda), 0.0});
      parts[s] = draw_population(problem, pol, lambda, seed, StreamTag::GapMean, s, buf).coupling;
    });
    for (const auto& m : parts) mean_agg.values() += m;
    mean_agg.values() /= double(opt.mean_samples);
  }
  const double f_mean = problem.aggregate->cost(mean_agg);

  std::vector<double> diffs(opt.samples);
  ex.for_each(opt.samples, [&](std::size_t s) {
    std::vector<Realization> buf(n, Realization{PriceSignal::zeros_like(lambda), 0.0});
    const AgentMeans m = draw_population(problem, pol, lambda, seed, StreamTag::GapEstimate, s, buf);
    diffs[s] = problem.aggregate->cost(PriceSignal(lambda.shared_channels(), m.coupling)) - f_mean;
  });
  const MeanEstimate e = mean_with_ci(diffs);
  g.estimate = e.mean;
  g.half_width = e.half_width;
  return g;
}

}  // namespace uzawa
