#pragma once

#include "uzawa/core/errors.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <vector>

namespace uzawa {

/// min 0.5 x'Qx + c'x  s.t.  A_eq x = b_eq,  A_in x <= b_in,  lower <= x <= upper.
///
/// Empty matrices mean "no such constraints". `lower`/`upper` are either empty
/// or of size N and may hold infinities. Names are optional and only used in
/// infeasibility reports.
struct QPProblem {
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd A_in;
  Eigen::VectorXd b_in;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<std::string> eq_names;
  std::vector<std::string> in_names;

  /// Zero problem with N variables and no constraints.
  static QPProblem with_size(Eigen::Index n);

  Eigen::Index size() const noexcept { return c.size(); }
  /// Throws std::invalid_argument on inconsistent dimensions or asymmetric Q.
  void validate() const;
  double objective(const Eigen::VectorXd& x) const { return 0.5 * x.dot(Q * x) + c.dot(x); }
};

/// KKT point. Stationarity reads
/// Qx + c + A_eq'y + A_in'z - z_lower + z_upper = 0 with z, z_lower, z_upper >= 0.
struct QPSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd z;
  Eigen::VectorXd z_lower;
  Eigen::VectorXd z_upper;
  double objective = 0.0;
  double stationarity = 0.0;
  double primal_residual = 0.0;
  double complementarity = 0.0;
  int iterations = 0;
};

struct QPOptions {
  /// Residual tolerance, relative to the scale of the problem data.
  double tol = 1e-8;
  int max_iterations = 150;
  bool check_psd = true;
};

class QPError : public Error {
 public:
  using Error::Error;
};

class Infeasible : public QPError {
 public:
  Infeasible(const std::string& what, std::vector<std::string> violated)
      : QPError(what), violated_(std::move(violated)) {}
  /// Most violated constraints of the least-violation point, worst first.
  const std::vector<std::string>& violated() const noexcept { return violated_; }

 private:
  std::vector<std::string> violated_;
};

class MaxIterations : public QPError {
 public:
  using QPError::QPError;
};

class NotPSD : public QPError {
 public:
  NotPSD(const std::string& what, double min_eigenvalue) : QPError(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// Primal-dual interior point with Mehrotra predictor-corrector steps.
QPSolution qp_solve(const QPProblem& problem, const QPOptions& options = {});
inline QPSolution qp_solve(const QPProblem& problem, double tol) {
  QPOptions o;
  o.tol = tol;
  return qp_solve(problem, o);
}

/// Plain-text dump: one block per matrix, `name rows cols` then rows of values.
void dump_qp(const QPProblem& problem, std::ostream& out);

}  // namespace uzawa
