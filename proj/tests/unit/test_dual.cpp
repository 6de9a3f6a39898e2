#include <doctest.h>

#include "uzawa/core/stats.hpp"
#include "uzawa/dual/estimators.hpp"
#include "uzawa/dual/toy.hpp"
#include "uzawa/dual/trace_io.hpp"
#include "uzawa/dual/uzawa.hpp"
#include "uzawa/lqg/oracles.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace uzawa;

namespace {

UzawaOptions opts(std::size_t K, std::uint64_t seed = 1, std::size_t workers = 1) {
  UzawaOptions o;
  o.iterations = K;
  o.seed = seed;
  o.workers = workers;
  return o;
}

double scalar(const PriceSignal& p) { return p.values()(0, 0); }

// n copies of the toy agent sharing the toy aggregate.
ProblemInstance replicated_toy(std::size_t n, double noise) {
  ProblemInstance p = make_toy_problem(1.0, noise);
  auto agent = p.agents.front();
  p.agents.assign(n, agent);
  return p;
}

ProblemInstance lqg_instance(std::size_t n, double C, std::size_t classes = 1) {
  LQGFamilyOptions o;
  o.C = C;
  o.classes = classes;
  o.heterogeneity = classes > 1 ? 0.5 : 0.0;
  return make_lqg_problem(make_lqg_family(n, o));
}

// F0(v) = sum of entries, so the gap vanishes in expectation.
class LinearAggregate : public AggregateOracle {
 public:
  double cost(const PriceSignal& v) const override { return v.values().sum(); }
  PriceSignal best_response(const PriceSignal& lambda) const override { return PriceSignal::zeros_like(lambda); }
};

}  // namespace

TEST_CASE("toy: one step from zero price") {
  const auto problem = make_toy_problem();
  const auto trace = stochastic_uzawa(problem, StepSchedule(1.0, 0.0), opts(1));
  REQUIRE(trace.iterates.size() == 1);
  CHECK(scalar(trace.iterates[0].gradient) == -1.0);
  CHECK(trace.iterates[0].rho == 1.0);
  CHECK(scalar(trace.final_price) == -1.0);
}

TEST_CASE("toy: stochastic Uzawa reaches the saddle point") {
  const auto trace = stochastic_uzawa(make_toy_problem(), StepSchedule(1.0, 10.0), opts(5000));
  CHECK(std::abs(scalar(trace.final_price) + 0.5) < 0.02);
  const auto noisy = stochastic_uzawa(make_toy_problem(1.0, 0.5), StepSchedule(1.0, 10.0), opts(5000, 3));
  CHECK(std::abs(scalar(noisy.final_price) + 0.5) < 0.02);
}

TEST_CASE("toy: deterministic Uzawa") {
  const auto problem = make_toy_problem();
  const auto trace = deterministic_uzawa(problem, StepSchedule(1.0, 10.0), opts(10000));
  CHECK(std::abs(scalar(trace.final_price) + 0.5) < 1e-6);

  UzawaOptions zero = opts(0);
  PriceSignal start = PriceSignal::zeros_like(problem.initial_price);
  start.values()(0, 0) = 0.3;
  zero.initial_price = start;
  CHECK(scalar(deterministic_uzawa(problem, StepSchedule(1.0, 10.0), zero).final_price) == 0.3);
}

TEST_CASE("deterministic Uzawa rejects agents without exact expectations") {
  class Opaque : public AgentOracle {
   public:
    std::shared_ptr<const AgentPolicy> best_response(const PriceSignal&) const override {
      return std::make_shared<AgentPolicy>();
    }
    void simulate(const AgentPolicy&, NoiseStream&, Realization& out) const override { out.local_cost = 0.0; }
  };
  ProblemInstance p = make_toy_problem();
  p.agents = {std::make_shared<Opaque>()};
  CHECK_THROWS_AS(deterministic_uzawa(p, StepSchedule(1.0, 1.0), opts(1)), CapabilityError);
}

TEST_CASE("zero-noise LQG: stochastic trace equals deterministic trace") {
  const auto problem = lqg_instance(4, 0.0, 2);
  const StepSchedule s(1.0, 10.0);
  const auto a = stochastic_uzawa(problem, s, opts(50));
  const auto b = deterministic_uzawa(problem, s, opts(50));
  REQUIRE(a.iterates.size() == b.iterates.size());
  for (std::size_t k = 0; k < a.iterates.size(); ++k) {
    CHECK((a.iterates[k].lambda.values() - b.iterates[k].lambda.values()).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK((a.final_price.values() - b.final_price.values()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("update identity holds bit for bit") {
  const auto problem = lqg_instance(6, 1.0, 3);
  for (bool sampled : {false, true}) {
    const auto trace = sampled ? sampled_stochastic_uzawa(problem, 3, StepSchedule(1.0, 5.0), opts(40, 9))
                               : stochastic_uzawa(problem, StepSchedule(1.0, 5.0), opts(40, 9));
    for (std::size_t k = 0; k < trace.iterations; ++k) {
      const auto& it = trace.iterates[k];
      Eigen::MatrixXd next = it.lambda.values();
      next += it.rho * it.gradient.values();
      CHECK(next == trace.price_at(k + 1).values());
    }
  }
}

TEST_CASE("sampled Uzawa with one agent averages m copies") {
  const auto problem = make_toy_problem(1.0, 1.0);
  const std::size_t m = 4, K = 2000;
  const auto trace = sampled_stochastic_uzawa(problem, m, StepSchedule(1e-12, 0.0), opts(K, 5));
  std::vector<double> y;
  for (const auto& it : trace.iterates) y.push_back(scalar(it.gradient) + 1.0);
  // At lambda ~ 0 the gradient is -1 plus the mean of m unit Gaussians.
  CHECK(std::abs(mean(y)) < 4.0 * std::sqrt(1.0 / double(m) / double(K)));
  CHECK(sample_variance(y) == doctest::Approx(1.0 / double(m)).epsilon(0.1));
}

TEST_CASE("sampled Uzawa: variance ratio between m = 1 and m = n is about n") {
  const std::size_t n = 8, K = 1000;
  const auto problem = replicated_toy(n, 1.0);
  auto gradients = [&](std::size_t m) {
    const auto trace = sampled_stochastic_uzawa(problem, m, StepSchedule(1e-12, 0.0), opts(K, 11 + m));
    std::vector<double> y;
    for (const auto& it : trace.iterates) y.push_back(scalar(it.gradient));
    return y;
  };
  const auto one = gradients(1);
  const auto all = gradients(n);
  CHECK(std::abs(mean(one) - mean(all)) < 4.0 * std::sqrt(1.0 / double(K)));
  const double ratio = sample_variance(one) / sample_variance(all);
  // Each variance has relative standard error sqrt(2/K), about 4.5%.
  CHECK(ratio > double(n) * 0.75);
  CHECK(ratio < double(n) * 1.33);
}

TEST_CASE("gradient draws are unbiased for the exact gradient") {
  const auto problem = lqg_instance(5, 1.0, 5);
  PriceSignal lambda = PriceSignal::zeros_like(problem.initial_price);
  for (Eigen::Index t = 0; t < lambda.values().cols(); ++t) lambda.values()(0, t) = 0.3 * std::sin(double(t));
  const PriceSignal exact = exact_gradient(problem, lambda);
  const std::size_t R = 2000;
  RunningStats stats[10];
  for (std::size_t r = 0; r < R; ++r) {
    const PriceSignal y = sample_gradient(problem, lambda, 1000 + r, 0);
    for (Eigen::Index t = 0; t < 10; ++t) stats[t].add(y.values()(0, t));
  }
  for (Eigen::Index t = 0; t < 10; ++t) {
    const double sd = std::sqrt(stats[t].variance());
    CHECK(std::abs(stats[t].mean() - exact.values()(0, t)) <= 3.0 * sd / std::sqrt(double(R)) + 1e-12);
  }
}

TEST_CASE("results do not depend on the worker count") {
  const auto problem = lqg_instance(12, 1.0, 3);
  const StepSchedule s(2.0, 10.0);
  const auto a = stochastic_uzawa(problem, s, opts(30, 4, 1));
  const auto b = stochastic_uzawa(problem, s, opts(30, 4, 4));
  const auto c = sampled_stochastic_uzawa(problem, 5, s, opts(30, 4, 1));
  const auto d = sampled_stochastic_uzawa(problem, 5, s, opts(30, 4, 3));
  CHECK(a.final_price.values() == b.final_price.values());
  CHECK(c.final_price.values() == d.final_price.values());
}

TEST_CASE("growth bound is enforced per iteration") {
  const auto problem = lqg_instance(3, 1.0);
  const GrowthBound bound = calibrate_growth_bound(problem, 7, {1.0, 10.0}, 50);
  UzawaOptions o = opts(200, 2);
  o.growth_bound = bound;
  CHECK_NOTHROW(stochastic_uzawa(problem, StepSchedule(1.0, 10.0), o));
  o.growth_bound = GrowthBound{1e-6, 0.0};
  CHECK_THROWS_AS(stochastic_uzawa(problem, StepSchedule(1.0, 10.0), o), DualAscentError);
}

TEST_CASE("divergence guard stops a runaway schedule") {
  try {
    stochastic_uzawa(make_toy_problem(), StepSchedule(100.0, 0.0), opts(100));
    FAIL("expected DualAscentError");
  } catch (const DualAscentError& e) {
    CHECK(e.iteration() < 100);
  }
}

TEST_CASE("non-finite gradients abort with the iteration index") {
  class Bad : public AggregateOracle {
   public:
    double cost(const PriceSignal&) const override { return 0.0; }
    PriceSignal best_response(const PriceSignal& lambda) const override {
      PriceSignal v = PriceSignal::zeros_like(lambda);
      v.values()(0, 0) = NAN;
      return v;
    }
  };
  ProblemInstance p = make_toy_problem();
  p.aggregate = std::make_shared<Bad>();
  try {
    stochastic_uzawa(p, StepSchedule(1.0, 1.0), opts(3));
    FAIL("expected DualAscentError");
  } catch (const DualAscentError& e) {
    CHECK(e.iteration() == 0);
  }
}

TEST_CASE("dual value of the toy problem") {
  const auto problem = make_toy_problem();
  PriceSignal lambda = PriceSignal::zeros_like(problem.initial_price);
  const MeanEstimate at_zero = estimate_dual_value(problem, lambda, 10, 1);
  CHECK(at_zero.mean == doctest::Approx(0.0).epsilon(1e-12));
  lambda.values()(0, 0) = -0.5;
  const MeanEstimate at_star = estimate_dual_value(problem, lambda, 10, 1);
  CHECK(at_star.mean == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(at_star.half_width == 0.0);

  // Grid search of the closed form: W(l) = -(l + l^2/2) - l^2/2 peaks at -0.5.
  double best = -1e300, arg = 0.0;
  for (int i = -2000; i <= 2000; ++i) {
    const double l = i * 1e-3;
    const double w = -(l + 0.5 * l * l) - 0.5 * l * l;
    if (w > best) best = w, arg = l;
  }
  CHECK(arg == doctest::Approx(-0.5));
  CHECK(best == doctest::Approx(0.25));
}

TEST_CASE("LQG dual value estimate matches the exact value") {
  const auto problem = lqg_instance(4, 1.0, 2);
  PriceSignal lambda = PriceSignal::zeros_like(problem.initial_price);
  lambda.values().setConstant(-0.4);
  const MeanEstimate est = estimate_dual_value(problem, lambda, 4000, 3);
  const double exact = lqg_exact_dual_value(problem, lambda);
  CHECK(std::abs(est.mean - exact) < 2.0 * est.half_width);
}

TEST_CASE("exact dual value rises along deterministic ascent") {
  const auto problem = lqg_instance(5, 1.0, 5);
  const auto trace = deterministic_uzawa(problem, StepSchedule(20.0, 1000.0), opts(40));
  double prev = -1e300;
  for (std::size_t k = 0; k <= trace.iterations; ++k) {
    const double w = lqg_exact_dual_value(problem, trace.price_at(k));
    CHECK(w >= prev - 1e-12);
    prev = w;
  }
}

TEST_CASE("gap estimator") {
  SUBCASE("linear F0 gives zero gap") {
    ProblemInstance p = lqg_instance(3, 1.0);
    p.aggregate = std::make_shared<LinearAggregate>();
    GapOptions o;
    o.samples = 200;
    const GapEstimate g = estimate_gap(p, p.initial_price, 5, o);
    CHECK(std::abs(g.estimate) <= g.half_width);
  }
  SUBCASE("one noisy agent has a strictly positive gap") {
    const auto p = lqg_instance(1, 1.0);
    GapOptions o;
    o.samples = 2000;
    const GapEstimate g = estimate_gap(p, p.initial_price, 6, o);
    CHECK(g.exact_mean);
    CHECK(g.estimate - g.half_width > 0.0);
  }
  SUBCASE("gap scales like 1/n") {
    std::vector<double> ln, lg;
    for (std::size_t n : {10, 100, 1000}) {
      const auto p = lqg_instance(n, 1.0);
      GapOptions o;
      o.samples = 1000;
      const GapEstimate g = estimate_gap(p, p.initial_price, 8, o);
      REQUIRE(g.estimate > 0.0);
      ln.push_back(std::log10(double(n)));
      lg.push_back(std::log10(g.estimate));
    }
    const double slope = ols(ln, lg).slope;
    CHECK(slope >= -1.3);
    CHECK(slope <= -0.7);
  }
}

TEST_CASE("trace CSV and metadata") {
  const auto trace = stochastic_uzawa(make_toy_problem(1.0, 0.1), StepSchedule(1.0, 10.0), opts(3));
  const auto dir = std::filesystem::temp_directory_path() / "uzawa_test_trace";
  std::filesystem::create_directories(dir);
  write_trace_csv(trace, dir / "trace.csv");
  write_trace_metadata(trace, {1, 1.0, 10.0, "stochastic", 42}, dir / "trace.json");
  std::ifstream in(dir / "trace.csv");
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "k,rho_k,channel,slot,lambda,Y");
  CHECK(lines[1].rfind("0," + format_number(1.0 / 11.0) + ",u,0,0,", 0) == 0);
  CHECK(lines[4] == "3,,u,0," + format_number(scalar(trace.final_price)) + ",");
  std::ifstream js(dir / "trace.json");
  const auto meta = nlohmann::json::parse(js);
  CHECK(meta["seed"] == 1);
  CHECK(meta["variant"] == "stochastic");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-2.5e-20) == "-2.5e-20");
  std::filesystem::remove_all(dir);
}
