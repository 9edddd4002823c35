#include "cdfpen/solvers.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cdfpen {

namespace {

double wlasso_objective(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& w, double lambda,
                        const Eigen::VectorXd& x) {
  return 0.5 * (y - A * x).squaredNorm() +
         lambda * w.cwiseProduct(x.cwiseAbs()).sum();
}

}  // namespace

MeasurementProblem::MeasurementProblem(Eigen::MatrixXd A_, Eigen::VectorXd y_,
                                       std::optional<Eigen::VectorXd> truth_)
    : A(std::move(A_)), y(std::move(y_)), truth(std::move(truth_)) {
  if (A.rows() < 1 || A.cols() < 1)
    throw std::invalid_argument("MeasurementProblem: empty matrix");
  if (y.size() != A.rows())
    throw std::invalid_argument("MeasurementProblem: y length != rows of A");
  if (truth && truth->size() != A.cols())
    throw std::invalid_argument("MeasurementProblem: truth length != cols of A");
  if (!A.allFinite() || !y.allFinite() || (truth && !truth->allFinite()))
    throw std::invalid_argument("MeasurementProblem: non-finite entries");
}

AdmmWorkspace::AdmmWorkspace(const Eigen::MatrixXd& A, double rho)
    : rho_(rho), wide_(A.rows() < A.cols()) {
  if (!(rho > 0.0)) throw std::invalid_argument("AdmmWorkspace: rho must be > 0");
  if (wide_) {
    Eigen::MatrixXd M = A * A.transpose() / rho;
    M.diagonal().array() += 1.0;
    llt_.compute(M);
  } else {
    Eigen::MatrixXd M = A.transpose() * A;
    M.diagonal().array() += rho;
    llt_.compute(M);
  }
  if (llt_.info() != Eigen::Success)
    throw std::runtime_error("AdmmWorkspace: factorization failed");
}

Eigen::VectorXd AdmmWorkspace::apply_inverse(const Eigen::MatrixXd& A,
                                             const Eigen::VectorXd& b) const {
  if (!wide_) return llt_.solve(b);
  // (A^T A + rho I)^-1 b = (b - A^T (A A^T/rho + I)^-1 A b / rho) / rho
  const Eigen::VectorXd Ab = A * b;
  return (b - A.transpose() * llt_.solve(Ab) / rho_) / rho_;
}

SolveResult AdmmWorkspace::solve(const Eigen::MatrixXd& A,
                                 const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& weights, double lambda,
                                 const AdmmConfig& cfg, Eigen::VectorXd* z_io,
                                 Eigen::VectorXd* u_io) const {
  const Eigen::Index n = A.cols();
  if (weights.size() != n)
    throw std::invalid_argument("solve_weighted_lasso: weight length != cols of A");
  if ((weights.array() < 0.0).any() || !weights.allFinite())
    throw std::invalid_argument("solve_weighted_lasso: weights must be finite and >= 0");
  if (!(lambda > 0.0))
    throw std::invalid_argument("solve_weighted_lasso: lambda must be > 0");

  const Eigen::VectorXd Aty = A.transpose() * y;
  const Eigen::VectorXd tau = (lambda / cfg.rho) * weights;

  Eigen::VectorXd z = z_io ? *z_io : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd u = u_io ? *u_io : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd x(n), z_old(n);

  SolveResult result;
  for (int it = 0; it < cfg.max_iter; ++it) {
    x = apply_inverse(A, Aty + cfg.rho * (z - u));
    z_old.swap(z);
    z = x + u;
    for (Eigen::Index j = 0; j < n; ++j) z[j] = soft_threshold(z[j], tau[j]);
    u += x - z;
    ++result.total_inner_iters;

    const double primal = (x - z).norm();
    const double dual = cfg.rho * (z - z_old).norm();
    if (primal <= cfg.tol_primal && dual <= cfg.tol_dual) {
      result.converged = true;
      break;
    }
  }

  result.xhat = z;
  result.objective_trace.push_back(wlasso_objective(A, y, weights, lambda, z));
  if (z_io) *z_io = z;
  if (u_io) *u_io = u;
  return result;
}

SolveResult solve_weighted_lasso(const MeasurementProblem& problem,
                                 const Eigen::VectorXd& weights, double lambda,
                                 const AdmmConfig& cfg) {
  AdmmWorkspace ws(problem.A, cfg.rho);
  return ws.solve(problem.A, problem.y, weights, lambda, cfg);
}

SolveResult solve_l1(const MeasurementProblem& problem, double lambda,
                     const AdmmConfig& cfg) {
  return solve_weighted_lasso(problem,
                              Eigen::VectorXd::Ones(problem.n()), lambda, cfg);
}

SolveResult irl1(const MeasurementProblem& problem, const PenaltyModel& model,
                 const Irl1Config& cfg, const AdmmConfig& admm) {
  AdmmWorkspace ws(problem.A, admm.rho);
  return irl1(problem, model, cfg, admm, ws);
}

SolveResult irl1(const MeasurementProblem& problem, const PenaltyModel& model,
                 const Irl1Config& cfg, const AdmmConfig& admm,
                 const AdmmWorkspace& workspace) {
  if (model.concavity() != Concavity::Concave)
    throw std::invalid_argument(
        "irl1: model " + model.spec() +
        " has a non-concave CDF; IRL1 is not applicable (the DCA and the "
        "iteratively reweighted tight convex algorithm for this case are out "
        "of scope)");
  if (!(cfg.lambda > 0.0)) throw std::invalid_argument("irl1: lambda must be > 0");
  if (!(cfg.stop_tol > 0.0)) throw std::invalid_argument("irl1: stop_tol must be > 0");

  const Eigen::Index n = problem.n();
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd x_prev = Eigen::VectorXd::Zero(n);

  SolveResult result;
  result.xhat = x_prev;
  double prev_obj = std::numeric_limits<double>::infinity();

  for (int l = 0; l < cfg.max_outer; ++l) {
    SolveResult inner =
        workspace.solve(problem.A, problem.y, w, cfg.lambda, admm, &z, &u);
    result.total_inner_iters += inner.total_inner_iters;

    const double obj = 0.5 * (problem.y - problem.A * inner.xhat).squaredNorm() +
                       cfg.lambda * penalty(model, inner.xhat);
    if (obj > prev_obj) break;  // keep the previous (monotone) iterate

    result.xhat = inner.xhat;
    result.objective_trace.push_back(obj);
    result.outer_iters = l + 1;
    prev_obj = obj;

    const double change = (result.xhat - x_prev).norm() /
                          std::max(x_prev.norm(), 1e-12);
    x_prev = result.xhat;
    if (l > 0 && change <= cfg.stop_tol) {
      result.converged = true;
      break;
    }
    if (l == 0 && problem.y.isZero(0.0)) {
      result.converged = true;
      break;
    }

    for (Eigen::Index j = 0; j < n; ++j)
      w[j] = irl1_weight(model, std::abs(result.xhat[j]), cfg.eps);
  }
  return result;
}

}  // namespace cdfpen
