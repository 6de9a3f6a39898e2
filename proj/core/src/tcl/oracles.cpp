#include "uzawa/tcl/oracles.hpp"

#include <stdexcept>

namespace uzawa {

TCLParams TCLPopulation::agent(std::size_t i) const {
  TCLParams p = classes.at(agent_class.at(i));
  p.x0 = x0[i];
  return p;
}

TCLPopulation make_tcl_population(const TCLPopulationOptions& o, std::uint64_t seed) {
  if (o.size == 0 || o.classes == 0) throw std::invalid_argument("tcl population: size and classes must be positive");
  if (!(o.gamma_spread >= 0.0 && o.gamma_spread < 2.0)) {
    throw std::invalid_argument("tcl population: gamma_spread must lie in [0, 2)");
  }
  o.base.validate();
  TCLPopulation pop;
  for (std::size_t c = 0; c < o.classes; ++c) {
    TCLParams p = o.base;
    const double pos = o.classes > 1 ? double(c) / double(o.classes - 1) - 0.5 : 0.0;
    p.gamma *= 1.0 + o.gamma_spread * pos;
    pop.classes.push_back(p);
  }
  NoiseStream draw(seed, {StreamTag::Population, 0, 0, 0});
  pop.agent_class.resize(o.size);
  pop.x0.resize(o.size);
  for (std::size_t i = 0; i < o.size; ++i) {
    pop.agent_class[i] = i % o.classes;
    pop.x0[i] = o.base.x_min + (o.base.x_max - o.base.x_min) * draw.uniform01();
  }
  return pop;
}

TCLAgent::TCLAgent(std::shared_ptr<const TCLClass> cls, double x0) : cls_(std::move(cls)), x0_(x0) {
  if (!cls_) throw std::invalid_argument("tcl agent: null class");
  cls_->params.validate();
  cls_->grid.validate();
}

TCLParams TCLAgent::params() const {
  TCLParams p = cls_->params;
  p.x0 = x0_;
  return p;
}

std::shared_ptr<const AgentPolicy> TCLAgent::best_response(const PriceSignal& lambda) const {
  return std::make_shared<TCLPolicy>(hjb_best_response(cls_->params, lambda, cls_->grid, cls_->hjb));
}

void TCLAgent::simulate_path(const AgentPolicy& policy, NoiseStream& stream, TCLPath& out, bool keep_paths) const {
  const auto& pol = static_cast<const TCLPolicy&>(policy);
  simulate_tcl(params(), pol.table(), cls_->grid, stream, out, keep_paths);
}

void TCLAgent::simulate(const AgentPolicy& policy, NoiseStream& stream, Realization& out) const {
  TCLPath path;
  simulate_path(policy, stream, path, false);
  if (out.coupling.channel_count() != 2 || out.coupling.slot_count() != path.slot_power.size()) {
    out.coupling = make_profile(path.slot_power.size());
  }
  auto& v = out.coupling.values();
  for (std::size_t s = 0; s < path.slot_power.size(); ++s) {
    v(0, Eigen::Index(s)) = path.slot_power[s];
    v(1, Eigen::Index(s)) = -path.slot_response[s];
  }
  out.local_cost = path.discomfort;
}

TCLAggregate::TCLAggregate(UCInstance uc, QPOptions options) : uc_(std::move(uc)), options_(options) {
  uc_.validate();
  if (!(uc_.population > 0.0)) throw std::invalid_argument("tcl aggregate: population must be positive");
}

double TCLAggregate::cost(const PriceSignal& v) const {
  return uc_cost(uc_, coupling_to_profile(v), options_).cost / uc_.population;
}

PriceSignal TCLAggregate::best_response(const PriceSignal& lambda) const {
  PriceSignal prices = make_prices(uc_.slots());
  prices.values() = lambda.values();
  PriceSignal v = PriceSignal::zeros_like(lambda);
  v.values() = profile_to_coupling(aggregate_response(uc_, prices, options_).profile).values();
  return v;
}

PriceSignal coupling_to_profile(const PriceSignal& coupling) {
  PriceSignal p = make_profile(coupling.slot_count());
  p.values() = coupling.values();
  p.values().row(1) *= -1.0;
  return p;
}

PriceSignal profile_to_coupling(const PriceSignal& profile) {
  PriceSignal c = make_prices(profile.slot_count());
  c.values() = profile.values();
  c.values().row(1) *= -1.0;
  return c;
}

ProblemInstance make_tcl_problem(const TCLPopulation& population, const UCInstance& uc, const TCLGrid& grid,
                                 const HJBOptions& hjb) {
  if (population.size() == 0) throw std::invalid_argument("tcl problem: empty population");
  if (grid.slots != uc.slots()) throw std::invalid_argument("tcl problem: grid and uc slot counts differ");
  ProblemInstance p;
  p.aggregate = std::make_shared<TCLAggregate>(uc);
  std::vector<std::shared_ptr<const TCLClass>> classes;
  for (const auto& c : population.classes) classes.push_back(std::make_shared<const TCLClass>(TCLClass{c, grid, hjb}));
  for (std::size_t i = 0; i < population.size(); ++i) {
    p.agents.push_back(std::make_shared<TCLAgent>(classes.at(population.agent_class[i]), population.x0[i]));
  }
  p.initial_price = make_prices(uc.slots());
  p.pairing_weight = uc.pairing_weight();
  return p;
}

}  // namespace uzawa
