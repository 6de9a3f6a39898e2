#pragma once

#include "uzawa/core/noise_stream.hpp"
#include "uzawa/core/price_signal.hpp"
#include "uzawa/core/problem.hpp"

#include <Eigen/Core>

#include <vector>

namespace uzawa {

/// Agent i: x_{t+1} = A x_t + B u_t + C w_{t+1}, w standard Gaussian in R^d,
/// controls u_0..u_{T-1} in R^p, local cost
///   sum_{t=0}^{T} d |x_t|^2 + sum_{t<T} q |u_t|^2 + d_final |x_T|^2.
struct LQGAgentParams {
  Eigen::MatrixXd A = Eigen::MatrixXd::Ones(1, 1);
  Eigen::MatrixXd B = Eigen::MatrixXd::Ones(1, 1);
  Eigen::MatrixXd C = Eigen::MatrixXd::Ones(1, 1);
  double d = 1.0;
  double q = 1.0;
  double d_final = 1.0;
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1);
  /// Control box [-box, box]; 0 means derived from the policy at zero price.
  double box = 0.0;

  static LQGAgentParams scalar(double A, double B, double C, double d, double q, double d_final, double x0);

  Eigen::Index state_dim() const noexcept { return A.rows(); }
  Eigen::Index control_dim() const noexcept { return B.cols(); }
  /// Throws std::invalid_argument on bad dimensions, q <= 0, d < 0 or d_final < 0.
  void validate() const;
};

/// F0(v) = nu * sum_t |v_t - r_t|^2 over the T control steps.
struct LQGAggregateParams {
  double nu = 1.0;
  Eigen::MatrixXd target;  // p x T
};

/// u_t = K_t x_t + k_t.
struct AffinePolicy : AgentPolicy {
  std::vector<Eigen::MatrixXd> gain;    // p x d per step
  std::vector<Eigen::VectorXd> offset;  // p per step

  std::size_t horizon() const noexcept { return gain.size(); }
};

/// Backward Riccati recursion for min E[local cost + sum_t <lambda_t, u_t>].
/// The price has p channels and T slots. Throws if the nominal mean control
/// leaves the box.
AffinePolicy riccati_best_response(const LQGAgentParams& agent, const PriceSignal& lambda);
/// Same recursion without the box check.
AffinePolicy riccati_unconstrained(const LQGAgentParams& agent, const PriceSignal& lambda);

/// Mean control path (p x T) propagated through the mean state.
Eigen::MatrixXd expected_control(const LQGAgentParams& agent, const AffinePolicy& policy);
PriceSignal exact_expected_control(const LQGAgentParams& agent, const AffinePolicy& policy,
                                   const PriceSignal::ChannelList& channels);

/// Exact first and second moments of a policy.
struct LQGMoments {
  Eigen::MatrixXd mean_control;    // p x T
  Eigen::MatrixXd control_std;     // p x T, per-coordinate standard deviation
  double expected_control_sq = 0;  // E sum_t |u_t|^2
  double expected_local_cost = 0;  // E of the local cost (price term excluded)
};
LQGMoments policy_moments(const LQGAgentParams& agent, const AffinePolicy& policy);

/// Box used for an agent: its `box` field, or 10 x max_t(|mean u_t| + 6 std u_t)
/// of the zero-price policy over a horizon of T steps (at least 10).
double default_box(const LQGAgentParams& agent, std::size_t horizon);

/// Writes the control path into `u` (p x T) and returns the realized local cost.
double simulate_lqg(const LQGAgentParams& agent, const AffinePolicy& policy, NoiseStream& stream,
                    Eigen::Ref<Eigen::MatrixXd> u);

/// v_t = r_t + lambda_t / (2 nu).
PriceSignal v_opt_lqg(const LQGAggregateParams& agg, const PriceSignal& lambda);
double lqg_aggregate_cost(const LQGAggregateParams& agg, const PriceSignal& v);

}  // namespace uzawa
