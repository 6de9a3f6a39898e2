#include "uzawa/lqg/oracles.hpp"

#include <stdexcept>
#include <string>

namespace uzawa {

namespace {

PriceSignal::ChannelList control_channels(Eigen::Index p) {
  std::vector<std::string> names;
  if (p == 1) {
    names.push_back("u");
  } else {
    for (Eigen::Index i = 0; i < p; ++i) names.push_back("u" + std::to_string(i));
  }
  return std::make_shared<const std::vector<std::string>>(std::move(names));
}


}  // namespace

LQGFamily make_lqg_family(std::size_t n, const LQGFamilyOptions& o) {
  if (n == 0) throw std::invalid_argument("lqg family: n must be positive");
  if (o.horizon == 0) throw std::invalid_argument("lqg family: horizon must be positive");
  if (o.classes == 0) throw std::invalid_argument("lqg family: need at least one class");
  LQGFamily f;
  f.horizon = o.horizon;
  f.aggregate.nu = o.nu;
  f.aggregate.target.resize(1, Eigen::Index(o.horizon));
  for (std::size_t t = 0; t < o.horizon; ++t) {
    const double frac = o.horizon > 1 ? double(t) / double(o.horizon - 1) : 0.0;
    f.aggregate.target(0, Eigen::Index(t)) = o.ramp_start + (o.ramp_end - o.ramp_start) * frac;
  }
  for (std::size_t c = 0; c < o.classes; ++c) {
    const double scale = 1.0 + o.heterogeneity * double(c) / double(o.classes);
    f.classes.push_back(LQGAgentParams::scalar(o.A, o.B, o.C, o.d * scale, o.q * scale, o.d_final, o.x0));
  }
  f.agent_class.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.agent_class[i] = i % o.classes;
  return f;
}

LQGAgent::LQGAgent(std::shared_ptr<const LQGAgentParams> params, std::size_t horizon) {
  if (!params) throw std::invalid_argument("lqg agent: null params");
  params->validate();
  auto boxed = std::make_shared<LQGAgentParams>(*params);
  boxed->box = default_box(*params, horizon);
  params_ = std::move(boxed);
  channels_ = control_channels(params_->control_dim());
}

std::shared_ptr<const AgentPolicy> LQGAgent::best_response(const PriceSignal& lambda) const {
  return std::make_shared<AffinePolicy>(riccati_best_response(*params_, lambda));
}

void LQGAgent::simulate(const AgentPolicy& policy, NoiseStream& stream, Realization& out) const {
  const auto& pol = static_cast<const AffinePolicy&>(policy);
  out.local_cost = simulate_lqg(*params_, pol, stream, out.coupling.values());
}

PriceSignal LQGAgent::expected_coupling(const AgentPolicy& policy) const {
  const auto& pol = static_cast<const AffinePolicy&>(policy);
  return PriceSignal(channels_, expected_control(*params_, pol));
}

ProblemInstance make_lqg_problem(const LQGFamily& f) {
  if (f.classes.empty() || f.agent_class.empty()) throw std::invalid_argument("lqg problem: empty family");
  ProblemInstance p;
  p.aggregate = std::make_shared<LQGAggregate>(f.aggregate);
  std::vector<std::shared_ptr<const AgentOracle>> by_class;
  for (const auto& c : f.classes) {
    by_class.push_back(std::make_shared<LQGAgent>(std::make_shared<const LQGAgentParams>(c), f.horizon));
  }
  for (std::size_t i : f.agent_class) {
    if (i >= by_class.size()) throw std::invalid_argument("lqg problem: agent class out of range");
    p.agents.push_back(by_class[i]);
  }
  const Eigen::Index pdim = f.classes.front().control_dim();
  p.initial_price = PriceSignal(control_channels(pdim), f.horizon);
  if (f.aggregate.target.rows() != pdim || f.aggregate.target.cols() != Eigen::Index(f.horizon)) {
    throw std::invalid_argument("lqg problem: target must be p x T");
  }
  return p;
}

double lqg_exact_dual_value(const ProblemInstance& problem, const PriceSignal& lambda) {
  const PriceSignal v = problem.aggregate->best_response(lambda);
  const double conj = lambda.dot(v) - problem.aggregate->cost(v);
  double local = 0.0;
  for (const auto& a : problem.agents) {
    const auto* agent = dynamic_cast<const LQGAgent*>(a.get());
    if (!agent) throw std::invalid_argument("lqg dual value: not an LQG agent");
    const AffinePolicy pol = riccati_unconstrained(agent->params(), lambda);
    const LQGMoments m = policy_moments(agent->params(), pol);
    local += m.expected_local_cost + (lambda.values().cwiseProduct(m.mean_control)).sum();
  }
  return -conj + local / double(problem.agent_count());
}

double lqg_max_control_second_moment(const ProblemInstance& problem, const PriceSignal& lambda) {
  double worst = 0.0;
  for (const auto& a : problem.agents) {
    const auto* agent = dynamic_cast<const LQGAgent*>(a.get());
    if (!agent) throw std::invalid_argument("lqg moments: not an LQG agent");
    const AffinePolicy pol = riccati_unconstrained(agent->params(), lambda);
    worst = std::max(worst, policy_moments(agent->params(), pol).expected_control_sq);
  }
  return worst;
}

}  // namespace uzawa
