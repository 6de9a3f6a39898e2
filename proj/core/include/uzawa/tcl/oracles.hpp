#pragma once

#include "uzawa/core/problem.hpp"
#include "uzawa/tcl/hjb.hpp"
#include "uzawa/tcl/thermal.hpp"
#include "uzawa/tcl/uc.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace uzawa {

/// Heterogeneous population: classes differ in gamma, agents in x0.
struct TCLPopulationOptions {
  TCLParams base;
  std::size_t size = 500;
  std::size_t classes = 5;
  /// Class c has gamma * (1 + spread * (c / (classes - 1) - 1/2)).
  double gamma_spread = 0.2;
};

struct TCLPopulation {
  std::vector<TCLParams> classes;      // x0 unused
  std::vector<std::size_t> agent_class;
  std::vector<double> x0;

  std::size_t size() const noexcept { return x0.size(); }
  TCLParams agent(std::size_t i) const;
};

/// Agent i is in class i mod classes; x0 is uniform on the comfort band,
/// drawn from the population stream of `seed`.
TCLPopulation make_tcl_population(const TCLPopulationOptions& options, std::uint64_t seed);

class TCLPolicy : public AgentPolicy {
 public:
  explicit TCLPolicy(OnOffPolicy table) : table_(std::move(table)) {}
  const OnOffPolicy& table() const noexcept { return table_; }

 private:
  OnOffPolicy table_;
};

/// Settings shared by all agents of one class.
struct TCLClass {
  TCLParams params;
  TCLGrid grid;
  HJBOptions hjb;
};

/// Coupling is (U, -R) per slot in W, so that the price (p, rho) pairs as
/// u p - r rho.
class TCLAgent : public AgentOracle {
 public:
  TCLAgent(std::shared_ptr<const TCLClass> cls, double x0);

  std::shared_ptr<const AgentPolicy> best_response(const PriceSignal& lambda) const override;
  void simulate(const AgentPolicy& policy, NoiseStream& stream, Realization& out) const override;
  const void* response_key() const override { return cls_.get(); }

  /// Full path, for diagnostics and tests.
  void simulate_path(const AgentPolicy& policy, NoiseStream& stream, TCLPath& out, bool keep_paths) const;
  TCLParams params() const;

 private:
  std::shared_ptr<const TCLClass> cls_;
  double x0_;
};

/// F0 per TCL: UC cost divided by the represented population.
class TCLAggregate : public AggregateOracle {
 public:
  TCLAggregate(UCInstance uc, QPOptions options = {});
  double cost(const PriceSignal& v) const override;
  PriceSignal best_response(const PriceSignal& lambda) const override;
  const UCInstance& uc() const noexcept { return uc_; }

 private:
  UCInstance uc_;
  QPOptions options_;
};

/// Engine coordinates (U, -R) to a profile (U, R) and back.
PriceSignal coupling_to_profile(const PriceSignal& coupling);
PriceSignal profile_to_coupling(const PriceSignal& profile);

ProblemInstance make_tcl_problem(const TCLPopulation& population, const UCInstance& uc, const TCLGrid& grid,
                                 const HJBOptions& hjb = {});

}  // namespace uzawa
