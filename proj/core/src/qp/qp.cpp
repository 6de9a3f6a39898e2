#include "uzawa/qp/qp.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace uzawa {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double inf_norm(const VectorXd& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }
double inf_norm(const MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

/// Inequality rows after folding finite bounds into A x <= b.
struct Standard {
  MatrixXd A;
  VectorXd b;
  std::vector<Index> lower_var;  // row -> variable for -x <= -l rows
  std::vector<Index> upper_var;
  Index n_in = 0;                // rows coming from A_in
};

Standard standardize(const QPProblem& p) {
  Standard st;
  const Index n = p.size();
  st.n_in = p.A_in.rows();
  std::vector<Index> lo, up;
  if (p.lower.size() == n) {
    for (Index j = 0; j < n; ++j)
      if (std::isfinite(p.lower[j])) lo.push_back(j);
  }
  if (p.upper.size() == n) {
    for (Index j = 0; j < n; ++j)
      if (std::isfinite(p.upper[j])) up.push_back(j);
  }
  const Index m = st.n_in + Index(lo.size()) + Index(up.size());
  st.A = MatrixXd::Zero(m, n);
  st.b = VectorXd::Zero(m);
  if (st.n_in) {
    st.A.topRows(st.n_in) = p.A_in;
    st.b.head(st.n_in) = p.b_in;
  }
  Index r = st.n_in;
  for (Index j : lo) {
    st.A(r, j) = -1.0;
    st.b[r] = -p.lower[j];
    ++r;
  }
  for (Index j : up) {
    st.A(r, j) = 1.0;
    st.b[r] = p.upper[j];
    ++r;
  }
  st.lower_var = std::move(lo);
  st.upper_var = std::move(up);
  return st;
}

MatrixXd checked_hessian(const QPProblem& p, bool check) {
  if (!check || p.size() == 0) return p.Q;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(p.Q);
  if (es.info() != Eigen::Success) throw NotPSD("qp: eigen decomposition of Q failed", std::nan(""));
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -1e-8) {
    throw NotPSD("qp: Q is not positive semidefinite (min eigenvalue " + std::to_string(min_eig) + ")", min_eig);
  }
  if (min_eig >= 0.0) return p.Q;
  VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

struct Core {
  QPSolution sol;
  bool converged = false;
};

/// Interior point on min 0.5x'Hx + c'x, Ex = f, Ax <= b.
Core interior_point(const MatrixXd& H, const VectorXd& c, const MatrixXd& E, const VectorXd& f, const MatrixXd& A,
                    const VectorXd& b, const QPOptions& opt) {
  const Index n = c.size(), p = E.rows(), m = A.rows();
  VectorXd x = VectorXd::Zero(n), y = VectorXd::Zero(p);
  VectorXd s = m ? VectorXd((b - A * x).cwiseMax(1.0)) : VectorXd();
  VectorXd z = VectorXd::Ones(m);

  const double data_scale = std::max({1.0, inf_norm(H), inf_norm(c), inf_norm(E), inf_norm(A)});
  const double rhs_scale = std::max({1.0, inf_norm(f), inf_norm(b)});
  const double blowup = 1e12 * data_scale * rhs_scale;
  const double delta = 1e-11 * data_scale;

  Core out;
  int stalled = 0;
  MatrixXd K(n + p, n + p);
  for (int it = 0; it <= opt.max_iterations; ++it) {
    const VectorXd Hx = H * x;
    const VectorXd Ety = p ? VectorXd(E.transpose() * y) : VectorXd::Zero(n);
    const VectorXd Atz = m ? VectorXd(A.transpose() * z) : VectorXd::Zero(n);
    const VectorXd Ex = p ? VectorXd(E * x) : VectorXd();
    const VectorXd Ax = m ? VectorXd(A * x) : VectorXd();
    const VectorXd rd = Hx + c + Ety + Atz;
    const VectorXd re = p ? VectorXd(Ex - f) : VectorXd();
    const VectorXd ri = m ? VectorXd(Ax + s - b) : VectorXd();
    const double mu = m ? s.dot(z) / double(m) : 0.0;
    const double objective = 0.5 * x.dot(Hx) + c.dot(x);

    const double stat = inf_norm(rd);
    double prim = inf_norm(re);
    if (m) prim = std::max(prim, (Ax - b).cwiseMax(0.0).maxCoeff());
    const double comp = m ? s.cwiseProduct(z).maxCoeff() : 0.0;
    const double stat_tol = opt.tol * (1.0 + std::max({inf_norm(c), inf_norm(Hx), inf_norm(Ety), inf_norm(Atz)}));
    const double prim_tol = opt.tol * (1.0 + std::max({inf_norm(f), inf_norm(b), inf_norm(Ex), inf_norm(Ax)}));
    const double comp_tol = opt.tol * (1.0 + std::abs(objective));
    const double slack_res = inf_norm(ri);

    out.sol.x = x;
    out.sol.y = y;
    out.sol.z = z;
    out.sol.objective = objective;
    out.sol.stationarity = stat;
    out.sol.primal_residual = prim;
    out.sol.complementarity = comp;
    out.sol.iterations = it;
    if (stat <= stat_tol && prim <= prim_tol && slack_res <= prim_tol && comp <= comp_tol) {
      out.converged = true;
      return out;
    }
    if (it == opt.max_iterations) break;
    if (!x.allFinite() || inf_norm(x) > blowup || inf_norm(y) > blowup || inf_norm(z) > blowup) break;

    const VectorXd d = m ? VectorXd(z.cwiseQuotient(s)) : VectorXd();
    K.setZero();
    K.topLeftCorner(n, n) = H;
    if (m) K.topLeftCorner(n, n).noalias() += A.transpose() * d.asDiagonal() * A;
    K.topLeftCorner(n, n).diagonal().array() += delta;
    if (p) {
      K.topRightCorner(n, p) = E.transpose();
      K.bottomLeftCorner(p, n) = E;
      K.bottomRightCorner(p, p).diagonal().setConstant(-delta);
    }
    Eigen::PartialPivLU<MatrixXd> lu(K);

    MatrixXd Kexact = K;
    Kexact.topLeftCorner(n, n).diagonal().array() -= delta;
    if (p) Kexact.bottomRightCorner(p, p).setZero();

    auto direction = [&](const VectorXd& rc, VectorXd& dx, VectorXd& dy, VectorXd& ds, VectorXd& dz) {
      VectorXd rhs(n + p);
      rhs.head(n) = -rd;
      if (m) rhs.head(n) += A.transpose() * (rc - z.cwiseProduct(ri)).cwiseQuotient(s);
      if (p) rhs.tail(p) = -re;
      VectorXd sol = lu.solve(rhs);
      for (int r = 0; r < 2; ++r) sol += lu.solve(rhs - Kexact * sol);
      dx = sol.head(n);
      dy = sol.tail(p);
      if (m) {
        ds = -ri - A * dx;
        dz = (-rc - z.cwiseProduct(ds)).cwiseQuotient(s);
      }
    };
    auto max_step = [](const VectorXd& v, const VectorXd& dv) {
      double a = 1.0;
      for (Index i = 0; i < v.size(); ++i)
        if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
      return a;
    };

    VectorXd dx, dy, ds, dz;
    if (m) {
      const VectorXd rc_aff = s.cwiseProduct(z);
      direction(rc_aff, dx, dy, ds, dz);
      const double a_aff = std::min(max_step(s, ds), max_step(z, dz));
      const double mu_aff = (s + a_aff * ds).dot(z + a_aff * dz) / double(m);
      const double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
      const VectorXd rc = rc_aff + ds.cwiseProduct(dz) - VectorXd::Constant(m, sigma * mu);
      direction(rc, dx, dy, ds, dz);
    } else {
      direction(VectorXd(), dx, dy, ds, dz);
    }
    double alpha = 1.0;
    if (m) alpha = std::min(1.0, 0.995 * std::min(max_step(s, ds), max_step(z, dz)));
    x += alpha * dx;
    if (p) y += alpha * dy;
    if (m) {
      s += alpha * ds;
      z += alpha * dz;
      s = s.cwiseMax(std::numeric_limits<double>::min());
      z = z.cwiseMax(std::numeric_limits<double>::min());
    }
    stalled = alpha < 1e-10 ? stalled + 1 : 0;
    if (stalled >= 5) break;
  }
  return out;
}

QPSolution unpack(const Core& core, const QPProblem& p, const Standard& st) {
  QPSolution s = core.sol;
  const VectorXd zall = s.z;
  s.z = zall.head(st.n_in);
  const Index n = p.size();
  s.z_lower = VectorXd::Zero(n);
  s.z_upper = VectorXd::Zero(n);
  Index r = st.n_in;
  for (Index j : st.lower_var) s.z_lower[j] = zall[r++];
  for (Index j : st.upper_var) s.z_upper[j] = zall[r++];
  if (s.y.size() == 0) s.y = VectorXd::Zero(p.A_eq.rows());
  return s;
}

[[noreturn]] void diagnose(const QPProblem& p, const Standard& st, const QPOptions& opt, const std::string& why) {
  const Index n = p.size(), neq = p.A_eq.rows(), m = st.A.rows();
  // Least total violation: min sum(t) with E x - t+ + t- = f, A x - t <= b, t >= 0.
  const Index nv = n + 2 * neq + m;
  MatrixXd H = MatrixXd::Zero(nv, nv);
  VectorXd c = VectorXd::Zero(nv);
  c.tail(nv - n).setOnes();
  MatrixXd E = MatrixXd::Zero(neq, nv);
  if (neq) {
    E.leftCols(n) = p.A_eq;
    E.block(0, n, neq, neq) = -MatrixXd::Identity(neq, neq);
    E.block(0, n + neq, neq, neq) = MatrixXd::Identity(neq, neq);
  }
  const Index nt = 2 * neq + m;
  MatrixXd A = MatrixXd::Zero(m + nt, nv);
  VectorXd b = VectorXd::Zero(m + nt);
  if (m) {
    A.topLeftCorner(m, n) = st.A;
    A.block(0, n + 2 * neq, m, m) = -MatrixXd::Identity(m, m);
    b.head(m) = st.b;
  }
  A.bottomRightCorner(nt, nt) = -MatrixXd::Identity(nt, nt);
  QPOptions fo = opt;
  fo.tol = std::max(opt.tol, 1e-9);
  fo.max_iterations = std::max(opt.max_iterations, 200);
  const Core feas = interior_point(H, c, E, p.b_eq, A, b, fo);
  const double scale = 1.0 + std::max(inf_norm(p.b_eq), inf_norm(st.b));
  if (!feas.converged || feas.sol.objective <= 1e-6 * scale) {
    throw MaxIterations("qp: " + why + " after " + std::to_string(opt.max_iterations) + " iterations");
  }
  struct Item {
    double amount;
    std::string name;
  };
  std::vector<Item> items;
  const VectorXd& t = feas.sol.x;
  auto label = [](const std::vector<std::string>& names, Index i, const char* kind) {
    return i < Index(names.size()) ? names[size_t(i)] : std::string(kind) + "[" + std::to_string(i) + "]";
  };
  for (Index i = 0; i < neq; ++i) {
    const double v = t[n + i] + t[n + neq + i];
    if (v > 1e-7 * scale) items.push_back({v, label(p.eq_names, i, "eq")});
  }
  for (Index i = 0; i < m; ++i) {
    const double v = t[n + 2 * neq + i];
    if (v <= 1e-7 * scale) continue;
    std::string name;
    if (i < st.n_in) {
      name = label(p.in_names, i, "in");
    } else if (i < st.n_in + Index(st.lower_var.size())) {
      name = "lower[" + std::to_string(st.lower_var[size_t(i - st.n_in)]) + "]";
    } else {
      name = "upper[" + std::to_string(st.upper_var[size_t(i - st.n_in - Index(st.lower_var.size()))]) + "]";
    }
    items.push_back({v, name});
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.amount > b.amount; });
  std::vector<std::string> names;
  std::string msg = "qp: infeasible (minimum total violation " + std::to_string(feas.sol.objective) + ")";
  for (std::size_t i = 0; i < items.size(); ++i) {
    names.push_back(items[i].name);
    if (i < 5) msg += (i ? ", " : "; most violated: ") + items[i].name + " by " + std::to_string(items[i].amount);
  }
  throw Infeasible(msg, std::move(names));
}

}  // namespace

QPProblem QPProblem::with_size(Eigen::Index n) {
  QPProblem p;
  p.Q = MatrixXd::Zero(n, n);
  p.c = VectorXd::Zero(n);
  p.A_eq = MatrixXd::Zero(0, n);
  p.b_eq = VectorXd::Zero(0);
  p.A_in = MatrixXd::Zero(0, n);
  p.b_in = VectorXd::Zero(0);
  return p;
}

void QPProblem::validate() const {
  const Index n = c.size();
  auto fail = [](const char* what) { throw std::invalid_argument(std::string("qp: ") + what); };
  if (Q.rows() != n || Q.cols() != n) fail("Q must be N x N");
  if (A_eq.rows() != b_eq.size()) fail("A_eq rows must match b_eq");
  if (A_eq.rows() > 0 && A_eq.cols() != n) fail("A_eq must have N columns");
  if (A_in.rows() != b_in.size()) fail("A_in rows must match b_in");
  if (A_in.rows() > 0 && A_in.cols() != n) fail("A_in must have N columns");
  if (lower.size() != 0 && lower.size() != n) fail("lower must be empty or of size N");
  if (upper.size() != 0 && upper.size() != n) fail("upper must be empty or of size N");
  if (!Q.allFinite() || !c.allFinite() || !A_eq.allFinite() || !b_eq.allFinite() || !A_in.allFinite() ||
      !b_in.allFinite())
    fail("non-finite problem data");
  if (n > 0 && (Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, inf_norm(Q))) fail("Q must be symmetric");
  for (Index j = 0; j < lower.size(); ++j)
    if (upper.size() && lower[j] > upper[j]) fail("lower bound above upper bound");
}

QPSolution qp_solve(const QPProblem& problem, const QPOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("qp: tolerance must be positive");
  problem.validate();
  const MatrixXd H = checked_hessian(problem, options.check_psd);
  const Standard st = standardize(problem);
  const MatrixXd E = problem.A_eq.rows() ? problem.A_eq : MatrixXd::Zero(0, problem.size());
  const Core core = interior_point(H, problem.c, E, problem.b_eq, st.A, st.b, options);
  if (!core.converged) diagnose(problem, st, options, "no convergence");
  QPSolution sol = unpack(core, problem, st);
  sol.objective = problem.objective(sol.x);
  return sol;
}

void dump_qp(const QPProblem& p, std::ostream& out) {
  const Eigen::IOFormat fmt(Eigen::FullPrecision, Eigen::DontAlignCols, " ", "\n");
  auto block = [&](const char* name, const MatrixXd& m) {
    out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    if (m.size()) out << m.format(fmt) << '\n';
  };
  block("Q", p.Q);
  block("c", p.c.transpose());
  block("A_eq", p.A_eq);
  block("b_eq", p.b_eq.transpose());
  block("A_in", p.A_in);
  block("b_in", p.b_in.transpose());
  block("lower", p.lower.transpose());
  block("upper", p.upper.transpose());
}

}  // namespace uzawa
