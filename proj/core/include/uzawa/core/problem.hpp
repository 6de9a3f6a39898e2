#pragma once

#include "uzawa/core/errors.hpp"
#include "uzawa/core/noise_stream.hpp"
#include "uzawa/core/price_signal.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace uzawa {

/// A solved best response. Concrete oracles downcast to their own type.
class AgentPolicy {
 public:
  virtual ~AgentPolicy() = default;
};

/// One simulated outcome of an agent under a policy: the coupling quantity
/// (same layout as the price) and the realized local cost.
struct Realization {
  PriceSignal coupling;
  double local_cost = 0.0;
};

/// Agent i: best response to a price and simulation under its own noise.
class AgentOracle {
 public:
  virtual ~AgentOracle() = default;

  /// Deterministic in the price.
  virtual std::shared_ptr<const AgentPolicy> best_response(const PriceSignal& lambda) const = 0;

  /// Deterministic in (policy, stream). `out.coupling` already has the price
  /// layout when called from the engine and must be overwritten entirely.
  virtual void simulate(const AgentPolicy& policy, NoiseStream& stream, Realization& out) const = 0;

  virtual bool has_exact_expectation() const { return false; }

  /// Exact expected coupling under the policy. Throws CapabilityError unless
  /// has_exact_expectation() is true.
  virtual PriceSignal expected_coupling(const AgentPolicy& policy) const;

  /// Agents returning the same key have identical best responses for every
  /// price, so the engine solves once per key and iteration.
  virtual const void* response_key() const { return this; }
};

/// The aggregate cost F0 and its price response v(lambda).
class AggregateOracle {
 public:
  virtual ~AggregateOracle() = default;

  virtual double cost(const PriceSignal& v) const = 0;
  /// A minimizer of F0(v) - <lambda, v>.
  virtual PriceSignal best_response(const PriceSignal& lambda) const = 0;
  /// Lipschitz constant of the gradient of F0 when known.
  virtual std::optional<double> gradient_lipschitz() const { return std::nullopt; }
};

/// An aggregate oracle plus n agents sharing one price layout.
///
/// `pairing_weight` converts the Euclidean sum over price entries into the
/// pairing <lambda, u> used in costs (for example slot length times a unit
/// conversion). It does not affect the price update.
struct ProblemInstance {
  std::shared_ptr<const AggregateOracle> aggregate;
  std::vector<std::shared_ptr<const AgentOracle>> agents;
  PriceSignal initial_price;
  double pairing_weight = 1.0;

  std::size_t agent_count() const noexcept { return agents.size(); }
  /// Throws std::invalid_argument if the instance is incomplete.
  void validate() const;
  double pairing(const PriceSignal& lambda, const PriceSignal& quantity) const {
    return pairing_weight * lambda.dot(quantity);
  }
};

}  // namespace uzawa
