#pragma once

// Brute-force reference solutions shared by the unit tests and the acceptance run.

#include "uzawa/core/noise_stream.hpp"
#include "uzawa/lqg/model.hpp"
#include "uzawa/qp/qp.hpp"
#include "uzawa/tcl/thermal.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace uzawa::testing {

/// Solves the equality-constrained KKT system for every subset of active
/// inequalities and keeps the best feasible point with z >= 0.
inline double active_set_oracle(const QPProblem& p, Eigen::VectorXd& best_x) {
  const auto n = p.size();
  const auto m = p.A_in.rows();
  double best = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < (1 << m); ++mask) {
    std::vector<int> act;
    for (int i = 0; i < m; ++i)
      if (mask & (1 << i)) act.push_back(i);
    const auto k = Eigen::Index(act.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + k, n + k);
    Eigen::VectorXd rhs(n + k);
    K.topLeftCorner(n, n) = p.Q;
    rhs.head(n) = -p.c;
    for (Eigen::Index j = 0; j < k; ++j) {
      K.block(0, n + j, n, 1) = p.A_in.row(act[j]).transpose();
      K.block(n + j, 0, 1, n) = p.A_in.row(act[j]);
      rhs[n + j] = p.b_in[act[j]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (lu.rank() < n + k) continue;
    Eigen::VectorXd sol = lu.solve(rhs);
    Eigen::VectorXd x = sol.head(n);
    if (m && (p.A_in * x - p.b_in).maxCoeff() > 1e-9) continue;
    if (k && sol.tail(k).minCoeff() < -1e-9) continue;
    const double f = p.objective(x);
    if (f < best) {
      best = f;
      best_x = x;
    }
  }
  return best;
}

/// PD quadratic with m random half-spaces; x = 0 is strictly feasible.
inline QPProblem random_qp(NoiseStream& s, int n, int m) {
  QPProblem p = QPProblem::with_size(n);
  Eigen::MatrixXd L(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) L(i, j) = s.gaussian();
  p.Q = L * L.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i) p.c[i] = 3.0 * s.gaussian();
  p.A_in = Eigen::MatrixXd(m, n);
  p.b_in = Eigen::VectorXd(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) p.A_in(i, j) = s.gaussian();
    p.b_in[i] = s.uniform01();
  }
  return p;
}

/// Expected cost of u_t = K_t x_t + k_t plus the pairing sum lambda_t E u_t,
/// by exact mean/variance propagation of the scalar dynamics.
inline double scalar_lqg_cost(const LQGAgentParams& a, const std::vector<double>& K, const std::vector<double>& k,
                              const std::vector<double>& lambda) {
  const double A = a.A(0, 0), B = a.B(0, 0), C = a.C(0, 0);
  double m = a.x0[0], v = 0.0, cost = 0.0;
  for (std::size_t t = 0; t < K.size(); ++t) {
    const double um = K[t] * m + k[t];
    const double uv = K[t] * K[t] * v;
    cost += a.d * (m * m + v) + a.q * (um * um + uv) + lambda[t] * um;
    const double g = A + B * K[t];
    m = g * m + B * k[t];
    v = g * g * v + C * C;
  }
  return cost + (a.d + a.d_final) * (m * m + v);
}

/// One random scalar instance with horizon 1..3 and its price.
struct RandomLQG {
  LQGAgentParams agent;
  std::vector<double> lambda;
};

inline RandomLQG random_lqg(std::mt19937_64& rng, std::size_t T) {
  std::uniform_real_distribution<double> U(-1.0, 1.0), P(0.2, 2.0);
  RandomLQG r{LQGAgentParams::scalar(U(rng) + 0.5, U(rng) + 1.5, P(rng), P(rng), P(rng), P(rng), U(rng)), {}};
  r.lambda.resize(T);
  for (auto& l : r.lambda) l = U(rng);
  return r;
}

/// First control minimizing the expected cost when later steps keep the given
/// feedback, by a grid search of step `h` on [-3, 3].
inline double grid_search_first_control(const LQGAgentParams& a, std::vector<double> K, std::vector<double> k,
                                        const std::vector<double>& lambda, double h = 1e-4) {
  K[0] = 0.0;
  double best = std::numeric_limits<double>::infinity(), arg = 0.0;
  const int steps = int(std::lround(3.0 / h));
  for (int i = -steps; i <= steps; ++i) {
    k[0] = i * h;
    const double c = scalar_lqg_cost(a, K, k, lambda);
    if (c < best) best = c, arg = k[0];
  }
  return arg;
}

/// Grid on which the chain is exactly deterministic: the state term is lost in
/// rounding against the huge ambient temperature, so drift is +-0.25 degC/s and
/// one step of 1 s moves exactly one node.
struct CoarseTCL {
  TCLParams params;
  TCLGrid grid;
};

inline CoarseTCL coarse_tcl() {
  CoarseTCL c;
  c.params.gamma = std::ldexp(1.0, 100);
  c.params.x_off = std::ldexp(1.0, 98);
  c.params.p_on = 1.0;
  c.params.zeta = std::ldexp(1.0, 99);
  c.params.alpha = 0.0;
  c.params.beta = 3.0;
  c.params.x_min = -0.5;
  c.params.x_max = 0.5;
  c.params.x_target = 0.0;
  c.params.terminal_weight = 0.7;
  c.grid.dt = 1.0;
  c.grid.steps = 8;
  c.grid.slots = 1;
  c.grid.x_lo = -1.0;
  c.grid.dx = 0.25;
  c.grid.nodes = 9;
  return c;
}

/// Minimum cost over every ON/OFF sequence from (t, j) with the first action fixed.
inline double enumerate_tcl(const CoarseTCL& c, std::size_t t, std::size_t j, int first) {
  const std::size_t rem = c.grid.steps - t;
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << rem); ++mask) {
    if (int(mask & 1u) != first) continue;
    std::size_t node = j;
    double cost = 0.0;
    for (std::size_t s = 0; s < rem; ++s) {
      const bool on = (mask >> s) & 1u;
      cost += c.params.discomfort_rate(c.grid.node(node)) * c.grid.dt;
      if (on) node = node == 0 ? 0 : node - 1;
      else node = std::min(node + 1, c.grid.nodes - 1);
    }
    cost += c.params.terminal_cost(c.grid.node(node));
    best = std::min(best, cost);
  }
  return best;
}

/// Decision the enumeration prescribes; ties go to OFF.
inline Mode enumerated_mode(const CoarseTCL& c, std::size_t t, std::size_t j) {
  const double off = enumerate_tcl(c, t, j, 0);
  const double on = enumerate_tcl(c, t, j, 1);
  return on < off - 1e-9 * std::max(1.0, std::abs(off)) ? Mode::On : Mode::Off;
}

}  // namespace uzawa::testing
