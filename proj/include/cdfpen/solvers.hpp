#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <optional>
#include <vector>

#include "cdfpen/penalties.hpp"

namespace cdfpen {

struct MeasurementProblem {
  Eigen::MatrixXd A;
  Eigen::VectorXd y;
  std::optional<Eigen::VectorXd> truth;

  MeasurementProblem(Eigen::MatrixXd A_, Eigen::VectorXd y_,
                     std::optional<Eigen::VectorXd> truth_ = std::nullopt);

  Eigen::Index m() const { return A.rows(); }
  Eigen::Index n() const { return A.cols(); }
};

struct AdmmConfig {
  double rho = 1.0;
  int max_iter = 2000;
  double tol_primal = 1e-8;
  double tol_dual = 1e-8;
};

struct Irl1Config {
  double lambda = 1e-7;
  int max_outer = 20;
  double eps = 1e-8;       // weight smoothing, added inside the density argument
  double stop_tol = 1e-8;  // relative iterate change
};

struct SolveResult {
  Eigen::VectorXd xhat;
  int outer_iters = 0;
  long total_inner_iters = 0;
  std::vector<double> objective_trace;
  bool converged = false;
};

inline double soft_threshold(double v, double tau) {
  return v > tau ? v - tau : (v < -tau ? v + tau : 0.0);
}

// Caches the x-update factorization of ADMM for a fixed (A, rho) so repeated
// weighted solves (IRL1 outer loop, paired benchmark trials) share it.
// For m < N the factor is of A A^T/rho + I via the matrix inversion identity,
// otherwise of A^T A + rho I.
class AdmmWorkspace {
 public:
  AdmmWorkspace(const Eigen::MatrixXd& A, double rho);

  // minimizes 0.5||y - Ax||^2 + lambda sum_j w_j |x_j|; z_io/u_io, when
  // non-null, carry warm-start state in and the final state out
  SolveResult solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& weights, double lambda,
                    const AdmmConfig& cfg, Eigen::VectorXd* z_io = nullptr,
                    Eigen::VectorXd* u_io = nullptr) const;

  double rho() const { return rho_; }

 private:
  Eigen::VectorXd apply_inverse(const Eigen::MatrixXd& A,
                                const Eigen::VectorXd& b) const;

  double rho_;
  bool wide_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

SolveResult solve_weighted_lasso(const MeasurementProblem& problem,
                                 const Eigen::VectorXd& weights, double lambda,
                                 const AdmmConfig& cfg);

SolveResult solve_l1(const MeasurementProblem& problem, double lambda,
                     const AdmmConfig& cfg);

// Iteratively reweighted l1 with weights f_theta(|x_j| + eps).  Requires a
// CONCAVE-classified model; others are rejected.
SolveResult irl1(const MeasurementProblem& problem, const PenaltyModel& model,
                 const Irl1Config& cfg, const AdmmConfig& admm);

// irl1 sharing a prebuilt workspace (same A and rho as the workspace)
SolveResult irl1(const MeasurementProblem& problem, const PenaltyModel& model,
                 const Irl1Config& cfg, const AdmmConfig& admm,
                 const AdmmWorkspace& workspace);

}  // namespace cdfpen
