#include "uzawa/tcl/coordination.hpp"

#include "uzawa/core/executor.hpp"
#include "uzawa/core/stats.hpp"
#include "uzawa/dual/uzawa.hpp"

#include <map>
#include <memory>
#include <stdexcept>

namespace uzawa {

double PopulationAverage::mean_discomfort() const { return mean(discomfort); }

namespace {

template <class Run>
PopulationAverage average(const TCLPopulation& pop, const TCLGrid& grid, std::uint64_t seed, std::size_t workers,
                          Run&& run) {
  const std::size_t n = pop.size();
  std::vector<TCLPath> paths(n);
  Executor(workers).for_each(n, [&](std::size_t i) {
    NoiseStream stream(seed, {StreamTag::Evaluation, i, 0, 0});
    run(i, stream, paths[i]);
  });
  PopulationAverage out{make_profile(grid.slots), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < grid.slots; ++s) {
      out.profile.values()(0, Eigen::Index(s)) += paths[i].slot_power[s];
      out.profile.values()(1, Eigen::Index(s)) += paths[i].slot_response[s];
    }
    out.discomfort[i] = paths[i].discomfort;
  }
  out.profile.values() /= double(n);
  return out;
}

}  // namespace

PopulationAverage bau_baseline(const TCLPopulation& pop, const TCLGrid& grid, std::uint64_t seed,
                               std::size_t workers) {
  if (pop.size() == 0) throw std::invalid_argument("bau_baseline: empty population");
  return average(pop, grid, seed, workers, [&](std::size_t i, NoiseStream& stream, TCLPath& path) {
    const TCLParams p = pop.agent(i);
    simulate_hysteresis(p, grid, p.x_max, p.x_min, stream, path);
  });
}

PopulationAverage evaluate_prices(const TCLPopulation& pop, const TCLGrid& grid, const PriceSignal& prices,
                                  std::uint64_t seed, const HJBOptions& hjb, std::size_t workers) {
  if (pop.size() == 0) throw std::invalid_argument("evaluate_prices: empty population");
  std::vector<OnOffPolicy> policies(pop.classes.size());
  Executor(workers).for_each(policies.size(), [&](std::size_t c) {
    policies[c] = hjb_best_response(pop.classes[c], prices, grid, hjb);
  });
  return average(pop, grid, seed, workers, [&](std::size_t i, NoiseStream& stream, TCLPath& path) {
    simulate_tcl(pop.agent(i), policies[pop.agent_class[i]], grid, stream, path);
  });
}

CoordinationResult coordination_experiment(const CoordinationConfig& cfg, double sigma) {
  if (cfg.samples == 0) throw std::invalid_argument("coordination: samples must be positive");
  if (cfg.evaluation_size == 0) throw std::invalid_argument("coordination: evaluation_size must be positive");
  CoordinationResult out;
  out.sigma = sigma;

  TCLPopulationOptions popt = cfg.population;
  popt.base.sigma = sigma;
  const TCLPopulation train = make_tcl_population(popt, derive_seed(cfg.seed, {StreamTag::Population, 0, 0, 0}));
  popt.size = cfg.evaluation_size;
  const TCLPopulation eval = make_tcl_population(popt, derive_seed(cfg.seed, {StreamTag::Population, 1, 0, 0}));
  const std::uint64_t eval_seed = derive_seed(cfg.seed, {StreamTag::Evaluation, 0, 0, 0});

  ProblemInstance problem = make_tcl_problem(train, cfg.uc, cfg.grid, cfg.hjb);
  if (cfg.initial_price == InitialPrice::Marginal) {
    const PopulationAverage bau_train =
        bau_baseline(train, cfg.grid, derive_seed(cfg.seed, {StreamTag::Baseline, 0, 0, 0}), cfg.workers);
    PriceSignal start = uc_marginal_prices(cfg.uc, bau_train.profile);
    problem.initial_price.values() = start.values();
  }
  out.initial_price = problem.initial_price;

  UzawaOptions opt;
  opt.seed = cfg.seed;
  opt.iterations = cfg.iterations;
  opt.workers = cfg.workers;
  opt.keep_trace = true;
  out.trace = sampled_stochastic_uzawa(problem, cfg.samples, cfg.schedule, opt);
  out.final_price = out.trace.final_price;

  out.flexible = evaluate_prices(eval, cfg.grid, out.final_price, eval_seed, cfg.hjb, cfg.workers);
  out.baseline = bau_baseline(eval, cfg.grid, eval_seed, cfg.workers);
  out.flexible_uc = uc_cost(cfg.uc, out.flexible.profile);
  out.baseline_uc = uc_cost(cfg.uc, out.baseline.profile);
  return out;
}

}  // namespace uzawa
