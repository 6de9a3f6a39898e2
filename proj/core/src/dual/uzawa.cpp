#include "uzawa/dual/uzawa.hpp"

#include "uzawa/core/executor.hpp"
#include "uzawa/dual/estimators.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace uzawa {

namespace {

/// Which agents are evaluated in one iteration and which of them share a
/// best response.
struct Plan {
  std::vector<std::size_t> agents;        // agent index per evaluation slot
  std::vector<std::size_t> representative;  // agent index per distinct response
  std::vector<std::size_t> slot_response;   // evaluation slot -> distinct response
};

Plan make_plan(const ProblemInstance& p, std::vector<std::size_t> agents) {
  Plan plan;
  plan.agents = std::move(agents);
  plan.slot_response.resize(plan.agents.size());
  std::unordered_map<const void*, std::size_t> seen;
  for (std::size_t j = 0; j < plan.agents.size(); ++j) {
    const std::size_t i = plan.agents[j];
    auto [it, inserted] = seen.emplace(p.agents[i]->response_key(), plan.representative.size());
    if (inserted) plan.representative.push_back(i);
    plan.slot_response[j] = it->second;
  }
  return plan;
}

std::vector<std::size_t> all_agents(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

class Engine {
 public:
  Engine(const ProblemInstance& p, std::size_t workers) : p_(p), ex_(workers) {}

  void solve(const Plan& plan, const PriceSignal& lambda) {
    policies_.assign(plan.representative.size(), nullptr);
    ex_.for_each(plan.representative.size(), [&](std::size_t r) {
      policies_[r] = p_.agents[plan.representative[r]]->best_response(lambda);
      if (!policies_[r]) throw std::runtime_error("agent returned no policy");
    });
  }

  /// Sum over evaluation slots of one realization each, reduced in slot order.
  PriceSignal realized_sum(const Plan& plan, const PriceSignal& layout, std::uint64_t seed, std::size_t k,
                           std::uint64_t extra) {
    const std::size_t m = plan.agents.size();
    if (buffer_.size() != m) buffer_.assign(m, Realization{PriceSignal::zeros_like(layout), 0.0});
    ex_.for_each(m, [&](std::size_t j) {
      NoiseStream stream(seed, StreamPath{StreamTag::AgentNoise, extra == 0 ? plan.agents[j] : j, k, extra});
      const std::size_t i = plan.agents[j];
      p_.agents[i]->simulate(*policies_[plan.slot_response[j]], stream, buffer_[j]);
    });
    PriceSignal sum = PriceSignal::zeros_like(layout);
    for (std::size_t j = 0; j < m; ++j) sum.values() += buffer_[j].coupling.values();
    return sum;
  }

  PriceSignal expected_sum(const Plan& plan, const PriceSignal& layout) {
    std::vector<PriceSignal> means(plan.representative.size());
    ex_.for_each(plan.representative.size(), [&](std::size_t r) {
      means[r] = p_.agents[plan.representative[r]]->expected_coupling(*policies_[r]);
    });
    PriceSignal sum = PriceSignal::zeros_like(layout);
    for (std::size_t j = 0; j < plan.agents.size(); ++j) sum.values() += means[plan.slot_response[j]].values();
    return sum;
  }

  const Executor& executor() const { return ex_; }

 private:
  const ProblemInstance& p_;
  Executor ex_;
  std::vector<std::shared_ptr<const AgentPolicy>> policies_;
  std::vector<Realization> buffer_;
};

enum class Variant { Stochastic, Sampled, Deterministic };

DualTrace run(const ProblemInstance& problem, Variant variant, std::size_t m, const StepSchedule& schedule,
              const UzawaOptions& opt) {
  problem.validate();
  const std::size_t n = problem.agent_count();
  if (variant == Variant::Sampled && m == 0) throw std::invalid_argument("sampled uzawa: m must be at least 1");
  if (opt.thinning == 0) throw std::invalid_argument("uzawa: thinning must be at least 1");
  if (variant == Variant::Deterministic) {
    for (const auto& a : problem.agents) {
      if (!a->has_exact_expectation()) throw CapabilityError("deterministic uzawa: agent without exact expectation");
    }
  }

  PriceSignal lambda = opt.initial_price ? *opt.initial_price : problem.initial_price;
  if (!lambda.same_layout(problem.initial_price)) throw std::invalid_argument("uzawa: initial price has wrong layout");
  if (!lambda.all_finite()) throw std::invalid_argument("uzawa: initial price not finite");
  const double guard = 1e6 * (lambda.norm() + 1.0);

  DualTrace trace;
  trace.iterations = opt.iterations;
  trace.thinning = opt.thinning;
  if (opt.keep_trace) trace.iterates.reserve(opt.iterations / opt.thinning + 1);

  Engine engine(problem, opt.workers);
  const Plan full = variant == Variant::Sampled ? Plan{} : make_plan(problem, all_agents(n));
  const double count = variant == Variant::Sampled ? double(m) : double(n);

  if (opt.on_price) opt.on_price(0, lambda);
  for (std::size_t k = 0; k < opt.iterations; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    const double rho = schedule.rho(k);
    PriceSignal y;
    try {
      const PriceSignal v = problem.aggregate->best_response(lambda);
      if (!v.same_layout(lambda)) throw std::runtime_error("aggregate response has wrong layout");
      PriceSignal sum;
      if (variant == Variant::Sampled) {
        NoiseStream pick(opt.seed, StreamPath{StreamTag::AgentSampling, 0, k, 0});
        std::vector<std::size_t> drawn(m);
        for (auto& d : drawn) d = pick.index(n);
        const Plan plan = make_plan(problem, std::move(drawn));
        engine.solve(plan, lambda);
        sum = engine.realized_sum(plan, lambda, opt.seed, k, 1);
      } else {
        engine.solve(full, lambda);
        sum = variant == Variant::Stochastic ? engine.realized_sum(full, lambda, opt.seed, k, 0)
                                             : engine.expected_sum(full, lambda);
      }
      y = PriceSignal(lambda.shared_channels(), sum.values() / count - v.values());
    } catch (const DualAscentError&) {
      throw;
    } catch (const std::exception& e) {
      throw DualAscentError(k, e.what());
    }
    if (!y.all_finite()) throw DualAscentError(k, "non-finite gradient estimate");
    if (opt.growth_bound && !opt.growth_bound->holds(y.squared_norm(), lambda.squared_norm())) {
      throw DualAscentError(k, "gradient growth bound violated: ||Y||^2 = " + std::to_string(y.squared_norm()) +
                                   " with ||lambda||^2 = " + std::to_string(lambda.squared_norm()));
    }

    DualIterate rec;
    const bool keep = opt.keep_trace && k % opt.thinning == 0;
    if (keep) {
      rec.k = k;
      rec.rho = rho;
      rec.lambda = lambda;
      rec.gradient = y;
      if (opt.dual_value_every && opt.dual_value_samples && k % opt.dual_value_every == 0) {
        rec.dual_value = estimate_dual_value(problem, lambda, opt.dual_value_samples,
                                             derive_seed(opt.seed, {StreamTag::DualEstimate, 0, k, 0}), opt.workers);
      }
    }

    lambda.values() += rho * y.values();
    if (!lambda.all_finite() || lambda.norm() > guard) {
      throw DualAscentError(k, "price diverged (||lambda|| = " + std::to_string(lambda.norm()) + ")");
    }
    if (keep) {
      rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      trace.iterates.push_back(std::move(rec));
    }
    if (opt.on_price) opt.on_price(k + 1, lambda);
  }
  trace.final_price = lambda;
  return trace;
}

}  // namespace

DualTrace stochastic_uzawa(const ProblemInstance& problem, const StepSchedule& schedule, const UzawaOptions& options) {
  return run(problem, Variant::Stochastic, 0, schedule, options);
}

DualTrace sampled_stochastic_uzawa(const ProblemInstance& problem, std::size_t m, const StepSchedule& schedule,
                                   const UzawaOptions& options) {
  return run(problem, Variant::Sampled, m, schedule, options);
}

DualTrace deterministic_uzawa(const ProblemInstance& problem, const StepSchedule& schedule,
                              const UzawaOptions& options) {
  return run(problem, Variant::Deterministic, 0, schedule, options);
}

PriceSignal exact_gradient(const ProblemInstance& problem, const PriceSignal& lambda, std::size_t workers) {
  problem.validate();
  Engine engine(problem, workers);
  const Plan plan = make_plan(problem, all_agents(problem.agent_count()));
  engine.solve(plan, lambda);
  const PriceSignal sum = engine.expected_sum(plan, lambda);
  const PriceSignal v = problem.aggregate->best_response(lambda);
  return PriceSignal(lambda.shared_channels(), sum.values() / double(problem.agent_count()) - v.values());
}

PriceSignal sample_gradient(const ProblemInstance& problem, const PriceSignal& lambda, std::uint64_t seed,
                            std::size_t k, std::size_t workers) {
  problem.validate();
  Engine engine(problem, workers);
  const Plan plan = make_plan(problem, all_agents(problem.agent_count()));
  engine.solve(plan, lambda);
  const PriceSignal sum = engine.realized_sum(plan, lambda, seed, k, 0);
  const PriceSignal v = problem.aggregate->best_response(lambda);
  return PriceSignal(lambda.shared_channels(), sum.values() / double(problem.agent_count()) - v.values());
}

GrowthBound calibrate_growth_bound(const ProblemInstance& problem, std::uint64_t seed,
                                   const std::vector<double>& scales, std::size_t draws, double safety) {
  problem.validate();
  GrowthBound g;
  const PriceSignal zero = PriceSignal::zeros_like(problem.initial_price);
  Engine engine(problem, 1);
  const Plan plan = make_plan(problem, all_agents(problem.agent_count()));
  auto worst = [&](const PriceSignal& lambda, std::uint64_t tag) {
    engine.solve(plan, lambda);
    const PriceSignal v = problem.aggregate->best_response(lambda);
    double w = 0.0;
    for (std::size_t d = 0; d < draws; ++d) {
      const PriceSignal sum = engine.realized_sum(plan, lambda, seed, tag * draws + d, 0);
      w = std::max(w, (sum.values() / double(problem.agent_count()) - v.values()).squaredNorm());
    }
    return w;
  };
  g.m1 = safety * worst(zero, 0) + 1e-12;
  NoiseStream dir(seed, {StreamTag::Test, 0, 0, 1});
  std::uint64_t tag = 1;
  for (double s : scales) {
    PriceSignal l = PriceSignal::zeros_like(zero);
    for (Eigen::Index i = 0; i < l.values().size(); ++i) l.values().data()[i] = dir.gaussian();
    l.values() *= s / l.norm();
    g.m2 = std::max(g.m2, safety * worst(l, tag++) / (s * s));
  }
  return g;
}

}  // namespace uzawa
