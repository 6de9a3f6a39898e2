#include "uzawa/lqg/model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace uzawa {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

LQGAgentParams LQGAgentParams::scalar(double A, double B, double C, double d, double q, double d_final, double x0) {
  LQGAgentParams p;
  p.A = MatrixXd::Constant(1, 1, A);
  p.B = MatrixXd::Constant(1, 1, B);
  p.C = MatrixXd::Constant(1, 1, C);
  p.d = d;
  p.q = q;
  p.d_final = d_final;
  p.x0 = VectorXd::Constant(1, x0);
  return p;
}

void LQGAgentParams::validate() const {
  const Index n = A.rows();
  auto fail = [](const std::string& w) { throw std::invalid_argument("lqg agent: " + w); };
  if (n < 1 || A.cols() != n) fail("A must be square");
  if (B.rows() != n || B.cols() < 1) fail("B must have d rows");
  if (C.rows() != n || C.cols() != n) fail("C must be d x d");
  if (x0.size() != n) fail("x0 must have d entries");
  if (!(q > 0.0)) fail("q must be positive");
  if (!(d >= 0.0)) fail("d must be nonnegative");
  if (!(d_final >= 0.0)) fail("d_final must be nonnegative");
  if (!(box >= 0.0)) fail("box must be nonnegative");
  if (!A.allFinite() || !B.allFinite() || !C.allFinite() || !x0.allFinite()) fail("non-finite data");
}

AffinePolicy riccati_unconstrained(const LQGAgentParams& a, const PriceSignal& lambda) {
  a.validate();
  const Index n = a.state_dim(), p = a.control_dim();
  if (Index(lambda.channel_count()) != p) throw std::invalid_argument("riccati: price channels must equal control dim");
  const std::size_t T = lambda.slot_count();
  if (T == 0) throw std::invalid_argument("riccati: empty horizon");

  AffinePolicy pol;
  pol.gain.resize(T);
  pol.offset.resize(T);
  if (n == 1 && p == 1) {
    const double A = a.A(0, 0), B = a.B(0, 0);
    double P = a.d + a.d_final, s = 0.0;
    for (std::size_t t = T; t-- > 0;) {
      const double H = a.q + B * P * B;
      const double K = -(B * P * A) / H;
      const double k = -(B * s + 0.5 * lambda(0, t)) / H;
      pol.gain[t] = MatrixXd::Constant(1, 1, K);
      pol.offset[t] = VectorXd::Constant(1, k);
      s = A * (P * B * k + s);
      P = a.d + A * P * (A + B * K);
    }
    return pol;
  }
  MatrixXd P = (a.d + a.d_final) * MatrixXd::Identity(n, n);
  VectorXd s = VectorXd::Zero(n);
  for (std::size_t t = T; t-- > 0;) {
    const MatrixXd H = a.q * MatrixXd::Identity(p, p) + a.B.transpose() * P * a.B;
    const Eigen::LDLT<MatrixXd> ldlt(H);
    const MatrixXd K = -ldlt.solve(a.B.transpose() * P * a.A);
    const VectorXd k = -ldlt.solve(a.B.transpose() * s + 0.5 * lambda.values().col(Index(t)));
    pol.gain[t] = K;
    pol.offset[t] = k;
    s = a.A.transpose() * (P * a.B * k + s);
    MatrixXd Pn = a.d * MatrixXd::Identity(n, n) + a.A.transpose() * P * (a.A + a.B * K);
    P = 0.5 * (Pn + Pn.transpose());
  }
  return pol;
}

MatrixXd expected_control(const LQGAgentParams& a, const AffinePolicy& pol) {
  const std::size_t T = pol.horizon();
  const Index p = a.control_dim();
  MatrixXd u(p, Index(T));
  if (a.state_dim() == 1 && p == 1) {
    const double A = a.A(0, 0), B = a.B(0, 0);
    double x = a.x0[0];
    for (std::size_t t = 0; t < T; ++t) {
      const double ut = pol.gain[t](0, 0) * x + pol.offset[t][0];
      u(0, Index(t)) = ut;
      x = A * x + B * ut;
    }
    return u;
  }
  VectorXd x = a.x0;
  for (std::size_t t = 0; t < T; ++t) {
    const VectorXd ut = pol.gain[t] * x + pol.offset[t];
    u.col(Index(t)) = ut;
    x = a.A * x + a.B * ut;
  }
  return u;
}

PriceSignal exact_expected_control(const LQGAgentParams& a, const AffinePolicy& pol,
                                   const PriceSignal::ChannelList& channels) {
  return PriceSignal(channels, expected_control(a, pol));
}

LQGMoments policy_moments(const LQGAgentParams& a, const AffinePolicy& pol) {
  const std::size_t T = pol.horizon();
  const Index n = a.state_dim(), p = a.control_dim();
  LQGMoments m;
  m.mean_control = expected_control(a, pol);
  m.control_std = MatrixXd::Zero(p, Index(T));
  VectorXd x = a.x0;
  MatrixXd S = MatrixXd::Zero(n, n);
  const MatrixXd CC = a.C * a.C.transpose();
  double cost = 0.0, usq = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const MatrixXd& K = pol.gain[t];
    const VectorXd ut = K * x + pol.offset[t];
    const MatrixXd Su = K * S * K.transpose();
    m.control_std.col(Index(t)) = Su.diagonal().cwiseMax(0.0).cwiseSqrt();
    const double u2 = ut.squaredNorm() + Su.trace();
    usq += u2;
    cost += a.d * (x.squaredNorm() + S.trace()) + a.q * u2;
    const MatrixXd F = a.A + a.B * K;
    x = a.A * x + a.B * ut;
    S = F * S * F.transpose() + CC;
  }
  cost += (a.d + a.d_final) * (x.squaredNorm() + S.trace());
  m.expected_control_sq = usq;
  m.expected_local_cost = cost;
  return m;
}

double default_box(const LQGAgentParams& a, std::size_t horizon) {
  if (a.box > 0.0) return a.box;
  PriceSignal zero(std::vector<std::string>(std::size_t(a.control_dim()), "u"), horizon);
  const AffinePolicy pol = riccati_unconstrained(a, zero);
  const LQGMoments m = policy_moments(a, pol);
  const double range = (m.mean_control.cwiseAbs() + 6.0 * m.control_std).maxCoeff();
  return 10.0 * std::max(range, 1.0);
}

AffinePolicy riccati_best_response(const LQGAgentParams& a, const PriceSignal& lambda) {
  AffinePolicy pol = riccati_unconstrained(a, lambda);
  const double box = default_box(a, lambda.slot_count());
  const MatrixXd u = expected_control(a, pol);
  const double worst = u.cwiseAbs().maxCoeff();
  if (!(worst <= box)) {
    throw std::runtime_error("riccati: nominal control " + std::to_string(worst) + " leaves the box [-" +
                             std::to_string(box) + ", " + std::to_string(box) + "]");
  }
  return pol;
}

double simulate_lqg(const LQGAgentParams& a, const AffinePolicy& pol, NoiseStream& stream,
                    Eigen::Ref<MatrixXd> u) {
  const std::size_t T = pol.horizon();
  const Index n = a.state_dim(), p = a.control_dim();
  double cost = 0.0;
  if (n == 1 && p == 1) {
    const double A = a.A(0, 0), B = a.B(0, 0), C = a.C(0, 0);
    double x = a.x0[0];
    for (std::size_t t = 0; t < T; ++t) {
      const double ut = pol.gain[t](0, 0) * x + pol.offset[t][0];
      u(0, Index(t)) = ut;
      cost += a.d * x * x + a.q * ut * ut;
      x = A * x + B * ut;
      if (C != 0.0) x += C * stream.gaussian();
    }
    return cost + (a.d + a.d_final) * x * x;
  }
  VectorXd x = a.x0, w(n);
  const bool noisy = !a.C.isZero(0.0);
  for (std::size_t t = 0; t < T; ++t) {
    const VectorXd ut = pol.gain[t] * x + pol.offset[t];
    u.col(Index(t)) = ut;
    cost += a.d * x.squaredNorm() + a.q * ut.squaredNorm();
    x = a.A * x + a.B * ut;
    if (noisy) {
      for (Index i = 0; i < n; ++i) w[i] = stream.gaussian();
      x += a.C * w;
    }
  }
  return cost + (a.d + a.d_final) * x.squaredNorm();
}

PriceSignal v_opt_lqg(const LQGAggregateParams& agg, const PriceSignal& lambda) {
  if (!(agg.nu > 0.0)) throw std::invalid_argument("lqg aggregate: nu must be positive");
  if (agg.target.rows() != lambda.values().rows() || agg.target.cols() != lambda.values().cols()) {
    throw std::invalid_argument("lqg aggregate: target and price shapes differ");
  }
  return PriceSignal(lambda.shared_channels(), agg.target + lambda.values() / (2.0 * agg.nu));
}

double lqg_aggregate_cost(const LQGAggregateParams& agg, const PriceSignal& v) {
  return agg.nu * (v.values() - agg.target).squaredNorm();
}

}  // namespace uzawa
