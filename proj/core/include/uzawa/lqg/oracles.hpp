#pragma once

#include "uzawa/core/problem.hpp"
#include "uzawa/lqg/model.hpp"

#include <memory>
#include <vector>

namespace uzawa {

/// A population of n agents drawn from a few parameter classes. Agents of one
/// class share a best response.
struct LQGFamily {
  LQGAggregateParams aggregate;
  std::vector<LQGAgentParams> classes;
  std::vector<std::size_t> agent_class;
  std::size_t horizon = 10;

  std::size_t size() const noexcept { return agent_class.size(); }
};

struct LQGFamilyOptions {
  std::size_t horizon = 10;
  double A = 1.0;
  double B = 1.0;
  double C = 1.0;
  double d = 1.0;
  double q = 1.0;
  double d_final = 1.0;
  double x0 = 1.0;
  double nu = 1.0;
  /// Target ramp r_t = ramp_start + (ramp_end - ramp_start) t / (T - 1).
  double ramp_start = 0.0;
  double ramp_end = 1.0;
  /// Number of classes; class c scales q and d by 1 + heterogeneity * c / classes.
  std::size_t classes = 1;
  double heterogeneity = 0.0;
};

/// Scalar family with agent i in class i mod classes.
LQGFamily make_lqg_family(std::size_t n, const LQGFamilyOptions& options);

class LQGAgent : public AgentOracle {
 public:
  LQGAgent(std::shared_ptr<const LQGAgentParams> params, std::size_t horizon);

  std::shared_ptr<const AgentPolicy> best_response(const PriceSignal& lambda) const override;
  void simulate(const AgentPolicy& policy, NoiseStream& stream, Realization& out) const override;
  bool has_exact_expectation() const override { return true; }
  PriceSignal expected_coupling(const AgentPolicy& policy) const override;
  const void* response_key() const override { return params_.get(); }

  const LQGAgentParams& params() const noexcept { return *params_; }

 private:
  std::shared_ptr<const LQGAgentParams> params_;
  PriceSignal::ChannelList channels_;
};

class LQGAggregate : public AggregateOracle {
 public:
  explicit LQGAggregate(LQGAggregateParams params) : params_(std::move(params)) {}
  double cost(const PriceSignal& v) const override { return lqg_aggregate_cost(params_, v); }
  PriceSignal best_response(const PriceSignal& lambda) const override { return v_opt_lqg(params_, lambda); }
  std::optional<double> gradient_lipschitz() const override { return 2.0 * params_.nu; }
  const LQGAggregateParams& params() const noexcept { return params_; }

 private:
  LQGAggregateParams params_;
};

ProblemInstance make_lqg_problem(const LQGFamily& family);

/// Exact W(lambda) using closed-form moments.
double lqg_exact_dual_value(const ProblemInstance& problem, const PriceSignal& lambda);

/// max_i E sum_t |u^i_t|^2 under the best response to lambda.
double lqg_max_control_second_moment(const ProblemInstance& problem, const PriceSignal& lambda);

}  // namespace uzawa
