#include <doctest.h>

#include "uzawa/core/stats.hpp"
#include "uzawa/dual/uzawa.hpp"
#include "uzawa/lqg/experiment.hpp"
#include "uzawa/lqg/model.hpp"
#include "uzawa/lqg/oracles.hpp"

#include "oracles.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>

using namespace uzawa;

namespace {

PriceSignal price(const std::vector<double>& values) {
  PriceSignal p({"u"}, values.size());
  for (std::size_t t = 0; t < values.size(); ++t) p.values()(0, Eigen::Index(t)) = values[t];
  return p;
}

using testing::scalar_lqg_cost;

}  // namespace

TEST_CASE("one-step Riccati example against grid search") {
  const auto agent = LQGAgentParams::scalar(1, 1, 1, 0, 1, 1, 0);
  const auto pol = riccati_best_response(agent, price({2.0}));
  const double u0 = pol.offset[0][0];
  CHECK(u0 == doctest::Approx(-0.5).epsilon(1e-12));

  double best = 1e300, arg = 0.0;
  for (int i = -20000; i <= 20000; ++i) {
    const double u = i * 1e-4;
    const double c = scalar_lqg_cost(agent, {0.0}, {u}, {2.0});
    if (c < best) best = c, arg = u;
  }
  CHECK(std::abs(arg - u0) <= 1e-4);
}

TEST_CASE("zero price from zero state gives zero control") {
  const auto agent = LQGAgentParams::scalar(1, 1, 1, 1, 1, 1, 0);
  const auto pol = riccati_best_response(agent, price(std::vector<double>(6, 0.0)));
  for (const auto& k : pol.offset) CHECK(k[0] == 0.0);
  CHECK(expected_control(agent, pol).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("state-independent policy has mean control equal to its offsets") {
  const auto agent = LQGAgentParams::scalar(0.9, 1, 1, 1, 1, 1, 2.0);
  AffinePolicy pol;
  for (int t = 0; t < 4; ++t) {
    pol.gain.push_back(Eigen::MatrixXd::Zero(1, 1));
    pol.offset.push_back(Eigen::VectorXd::Constant(1, 0.25 * t));
  }
  const auto mean = expected_control(agent, pol);
  for (int t = 0; t < 4; ++t) CHECK(mean(0, t) == 0.25 * t);
}

TEST_CASE("Riccati matches grid search on random small instances") {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = testing::random_lqg(rng, 1 + std::size_t(trial % 3));
    const auto pol = riccati_unconstrained(inst.agent, price(inst.lambda));
    std::vector<double> K, k;
    for (std::size_t t = 0; t < inst.lambda.size(); ++t) K.push_back(pol.gain[t](0, 0)), k.push_back(pol.offset[t][0]);
    // Later steps keep the Riccati feedback; search the first control only.
    const double arg = testing::grid_search_first_control(inst.agent, K, k, inst.lambda);
    worst = std::max(worst, std::abs(arg - (K[0] * inst.agent.x0[0] + k[0])));
  }
  CHECK(worst <= 1e-3);
}

TEST_CASE("offsets are affine in the price and gains do not depend on it") {
  const auto agent = LQGAgentParams::scalar(1.1, 0.8, 1, 1.5, 0.7, 2, 0.4);
  const auto l1 = price({0.3, -1.0, 2.0, 0.5});
  const auto l2 = price({-2.0, 0.1, 0.4, 1.5});
  const double alpha = 0.3;
  PriceSignal mix = l1;
  mix.values() = alpha * l1.values() + (1 - alpha) * l2.values();
  const auto p1 = riccati_unconstrained(agent, l1);
  const auto p2 = riccati_unconstrained(agent, l2);
  const auto pm = riccati_unconstrained(agent, mix);
  for (std::size_t t = 0; t < 4; ++t) {
    CHECK(pm.gain[t](0, 0) == p1.gain[t](0, 0));
    CHECK(pm.gain[t](0, 0) == p2.gain[t](0, 0));
    CHECK(std::abs(pm.offset[t][0] - (alpha * p1.offset[t][0] + (1 - alpha) * p2.offset[t][0])) < 1e-10);
  }
}

TEST_CASE("Riccati policy beats random affine policies on common noise") {
  const auto agent = LQGAgentParams::scalar(1, 1, 1, 1, 1, 1, 1);
  const auto lam = price({0.5, -0.3, 0.2, 0.0, 0.7});
  const auto opt = riccati_unconstrained(agent, lam);
  const std::size_t paths = 4000;
  auto mc_cost = [&](const AffinePolicy& pol) {
    double total = 0.0;
    Eigen::MatrixXd u(1, 5);
    for (std::size_t s = 0; s < paths; ++s) {
      NoiseStream st(77, {StreamTag::Test, s, 0, 0});
      total += simulate_lqg(agent, pol, st, u);
      total += (lam.values().array() * u.array()).sum();
    }
    return total / double(paths);
  };
  const double best = mc_cost(opt);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N(0.0, 0.3);
  for (int r = 0; r < 100; ++r) {
    AffinePolicy pol = opt;
    for (std::size_t t = 0; t < 5; ++t) {
      pol.gain[t](0, 0) += N(rng);
      pol.offset[t][0] += N(rng);
    }
    CHECK(best <= mc_cost(pol));
  }
}

TEST_CASE("exact expected control matches Monte Carlo") {
  const auto agent = LQGAgentParams::scalar(0.95, 1.0, 0.7, 1, 2, 1, 1.5);
  const auto lam = price({0.4, 0.1, -0.6, 0.9, 0.0, -0.2});
  const auto pol = riccati_best_response(agent, lam);
  const auto mom = policy_moments(agent, pol);
  const auto mean = expected_control(agent, pol);
  const std::size_t N = 100000;
  Eigen::MatrixXd u(1, 6), sum = Eigen::MatrixXd::Zero(1, 6);
  RunningStats cost;
  for (std::size_t s = 0; s < N; ++s) {
    NoiseStream st(5, {StreamTag::Test, s, 1, 0});
    cost.add(simulate_lqg(agent, pol, st, u));
    sum += u;
  }
  sum /= double(N);
  for (int t = 0; t < 6; ++t) {
    const double tol = 4.0 * std::max(mom.control_std(0, t), 1e-12) / std::sqrt(double(N));
    CHECK(std::abs(sum(0, t) - mean(0, t)) <= tol + 1e-10);
    CHECK(mom.mean_control(0, t) == doctest::Approx(mean(0, t)));
  }
  CHECK(std::abs(cost.mean() - mom.expected_local_cost) < 4.0 * std::sqrt(cost.variance() / double(N)));
}

TEST_CASE("box check rejects mis-scaled instances") {
  auto agent = LQGAgentParams::scalar(1, 1, 1, 1, 1, 1, 0);
  agent.box = 0.1;
  CHECK_THROWS(riccati_best_response(agent, price({5.0, 5.0})));
  CHECK_NOTHROW(riccati_unconstrained(agent, price({5.0, 5.0})));
}

TEST_CASE("aggregate response examples") {
  LQGAggregateParams agg;
  agg.target = Eigen::MatrixXd::Zero(1, 3);
  CHECK(v_opt_lqg(agg, price({0, 0, 0})).values().cwiseAbs().maxCoeff() == 0.0);
  CHECK(v_opt_lqg(agg, price({2, 2, 2})).values()(0, 1) == doctest::Approx(1.0));
  agg.nu = 0.5;
  agg.target.setConstant(3.0);
  CHECK(v_opt_lqg(agg, price({1, 1, 1})).values()(0, 2) == doctest::Approx(4.0));

  // Grid-search oracle for nu v^2 - lambda v.
  for (auto [nu, r, l] : std::vector<std::tuple<double, double, double>>{{1, 0, 2}, {0.5, 3, 1}}) {
    double best = 1e300, arg = 0;
    for (int i = -50000; i <= 100000; ++i) {
      const double v = i * 1e-4;
      const double c = nu * (v - r) * (v - r) - l * v;
      if (c < best) best = c, arg = v;
    }
    LQGAggregateParams a;
    a.nu = nu;
    a.target = Eigen::MatrixXd::Constant(1, 1, r);
    CHECK(std::abs(v_opt_lqg(a, price({l})).values()(0, 0) - arg) < 1e-4);
  }
}

TEST_CASE("exact dual value is concave along a segment") {
  LQGFamilyOptions o;
  o.classes = 3;
  o.heterogeneity = 0.5;
  const auto problem = make_lqg_problem(make_lqg_family(6, o));
  std::mt19937_64 rng(8);
  std::normal_distribution<double> N;
  PriceSignal a = PriceSignal::zeros_like(problem.initial_price), b = a;
  for (Eigen::Index t = 0; t < a.values().cols(); ++t) a.values()(0, t) = N(rng), b.values()(0, t) = N(rng);
  std::vector<double> w;
  for (int i = 0; i <= 20; ++i) {
    PriceSignal l = a;
    l.values() = a.values() + (i / 20.0) * (b.values() - a.values());
    w.push_back(lqg_exact_dual_value(problem, l));
  }
  for (std::size_t i = 1; i + 1 < w.size(); ++i) CHECK(w[i - 1] - 2 * w[i] + w[i + 1] <= 1e-9);
}

TEST_CASE("bias/variance report identities") {
  BiasVarianceConfig cfg;
  cfg.populations = {3, 6};
  cfg.checkpoints = {1, 5, 20};
  cfg.reference_iterations = 500;
  cfg.reference_schedule = StepSchedule(100.0, 100.0);
  cfg.seed = 4;
  cfg.family = [](std::size_t n) { return make_lqg_family(n, {}); };

  SUBCASE("variance plus squared bias") {
    cfg.runs = 8;
    const auto r = bias_variance_experiment(cfg);
    REQUIRE(r.cells.size() == 6);
    for (const auto& c : r.cells) {
      CHECK(c.error == c.variance + c.bias_sq);
      CHECK(c.bias_sq == c.bias.squaredNorm());
      CHECK(c.variance > 0.0);
    }
    const auto dir = std::filesystem::temp_directory_path() / "uzawa_test_bv";
    std::filesystem::create_directories(dir);
    const auto files = write_report_tables(r, dir);
    CHECK(files.size() == 3);
    std::ifstream in(dir / "log_variance_price_x_iteration.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "log10_k,n=3,n=6");
    std::filesystem::remove_all(dir);
  }
  SUBCASE("single replicate has zero variance") {
    cfg.runs = 1;
    const auto r = bias_variance_experiment(cfg);
    for (const auto& c : r.cells) {
      CHECK(c.variance == 0.0);
      CHECK(c.error == c.bias_sq);
    }
  }
  SUBCASE("zero noise: bias is the deterministic error") {
    cfg.runs = 3;
    cfg.family = [](std::size_t n) {
      LQGFamilyOptions o;
      o.C = 0.0;
      return make_lqg_family(n, o);
    };
    const auto r = bias_variance_experiment(cfg);
    const auto problem = make_lqg_problem(cfg.family(3));
    UzawaOptions uo;
    uo.iterations = 20;
    const auto det = deterministic_uzawa(problem, cfg.schedule, uo);
    const auto& c = r.cell(0, 2);
    CHECK(c.variance < 1e-24);
    CHECK((c.bias - (det.price_at(20).values() - r.reference[0].values())).cwiseAbs().maxCoeff() < 1e-12);
  }
}
