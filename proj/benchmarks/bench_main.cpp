#include "uzawa/dual/uzawa.hpp"
#include "uzawa/lqg/model.hpp"
#include "uzawa/lqg/oracles.hpp"
#include "uzawa/qp/qp.hpp"
#include "uzawa/tcl/hjb.hpp"
#include "uzawa/tcl/oracles.hpp"
#include "uzawa/tcl/uc.hpp"

#include <benchmark/benchmark.h>

using namespace uzawa;

static void BM_SlotQP(benchmark::State& state) {
  const auto uc = desk_uc_instance();
  const auto qp = uc_slot_qp(uc, 36, 1.2, 0.6, state.range(0) != 0, 60.0, 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(qp_solve(qp));
}
BENCHMARK(BM_SlotQP)->Arg(0)->Arg(1);

static void BM_Riccati(benchmark::State& state) {
  const auto agent = LQGAgentParams::scalar(1, 1, 1, 1, 1, 1, 1);
  PriceSignal lambda({"u"}, std::size_t(state.range(0)));
  lambda.values().setConstant(0.3);
  for (auto _ : state) benchmark::DoNotOptimize(riccati_unconstrained(agent, lambda));
}
BENCHMARK(BM_Riccati)->Arg(10)->Arg(100);

static void BM_HJBDay(benchmark::State& state) {
  TCLParams p;
  p.sigma = double(state.range(0));
  const auto grid = TCLGrid::daily(7.6, 0.15, p.x_min, p.x_max);
  auto prices = make_prices(grid.slots);
  prices.values().row(0).setConstant(50.0);
  for (auto _ : state) benchmark::DoNotOptimize(hjb_best_response(p, prices, grid));
}
BENCHMARK(BM_HJBDay)->Arg(0)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_SampledIterationLQG(benchmark::State& state) {
  LQGFamilyOptions o;
  o.classes = 5;
  o.heterogeneity = 0.5;
  const auto problem = make_lqg_problem(make_lqg_family(std::size_t(state.range(0)), o));
  UzawaOptions uo;
  uo.iterations = 1;
  uo.keep_trace = false;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    uo.seed = ++seed;
    benchmark::DoNotOptimize(sampled_stochastic_uzawa(problem, 50, StepSchedule(5.0, 10.0), uo));
  }
}
BENCHMARK(BM_SampledIterationLQG)->Arg(100)->Arg(1000);

static void BM_SampledIterationTCL(benchmark::State& state) {
  TCLPopulationOptions o;
  o.size = 500;
  const auto pop = make_tcl_population(o, 1);
  const auto uc = desk_uc_instance();
  const auto problem = make_tcl_problem(pop, uc, TCLGrid::daily(7.6, 0.15, -21.0, -14.0));
  UzawaOptions uo;
  uo.iterations = 1;
  uo.keep_trace = false;
  auto start = make_prices(uc.slots());
  start.values().row(0).setConstant(50.0);
  uo.initial_price = start;
  for (auto _ : state) benchmark::DoNotOptimize(sampled_stochastic_uzawa(problem, 50, StepSchedule(0.05, 10.0), uo));
}
BENCHMARK(BM_SampledIterationTCL)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
