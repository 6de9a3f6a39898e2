#include "uzawa/dual/toy.hpp"

namespace uzawa {

namespace {

struct ToyPolicy : AgentPolicy {
  double u = 0.0;
};

class ToyAgent : public AgentOracle {
 public:
  explicit ToyAgent(double noise) : noise_(noise) {}

  std::shared_ptr<const AgentPolicy> best_response(const PriceSignal& lambda) const override {
    auto p = std::make_shared<ToyPolicy>();
    p->u = -lambda(0, 0);
    return p;
  }
  void simulate(const AgentPolicy& policy, NoiseStream& stream, Realization& out) const override {
    const double u = static_cast<const ToyPolicy&>(policy).u + (noise_ != 0.0 ? noise_ * stream.gaussian() : 0.0);
    out.coupling(0, 0) = u;
    out.local_cost = 0.5 * u * u;
  }
  bool has_exact_expectation() const override { return true; }
  PriceSignal expected_coupling(const AgentPolicy& policy) const override {
    PriceSignal s(channels(), 1);
    s(0, 0) = static_cast<const ToyPolicy&>(policy).u;
    return s;
  }

  static const PriceSignal::ChannelList& channels() {
    static const PriceSignal::ChannelList ch = std::make_shared<const std::vector<std::string>>(1, "u");
    return ch;
  }

 private:
  double noise_;
};

class ToyAggregate : public AggregateOracle {
 public:
  explicit ToyAggregate(double target) : target_(target) {}
  double cost(const PriceSignal& v) const override { return 0.5 * (v(0, 0) - target_) * (v(0, 0) - target_); }
  PriceSignal best_response(const PriceSignal& lambda) const override {
    PriceSignal v = PriceSignal::zeros_like(lambda);
    v(0, 0) = target_ + lambda(0, 0);
    return v;
  }
  std::optional<double> gradient_lipschitz() const override { return 1.0; }

 private:
  double target_;
};

}  // namespace

ProblemInstance make_toy_problem(double target, double noise) {
  ProblemInstance p;
  p.aggregate = std::make_shared<ToyAggregate>(target);
  p.agents.push_back(std::make_shared<ToyAgent>(noise));
  p.initial_price = PriceSignal(ToyAgent::channels(), 1);
  return p;
}

}  // namespace uzawa
