#include "uzawa/core/problem.hpp"

#include <stdexcept>

namespace uzawa {

PriceSignal AgentOracle::expected_coupling(const AgentPolicy&) const {
  throw CapabilityError("agent oracle has no exact expectation");
}

void ProblemInstance::validate() const {
  if (!aggregate) throw std::invalid_argument("problem: missing aggregate oracle");
  if (agents.empty()) throw std::invalid_argument("problem: no agents");
  for (const auto& a : agents) {
    if (!a) throw std::invalid_argument("problem: null agent oracle");
  }
  if (initial_price.size() == 0) throw std::invalid_argument("problem: empty price layout");
  if (!initial_price.all_finite()) throw std::invalid_argument("problem: initial price not finite");
}

}  // namespace uzawa
