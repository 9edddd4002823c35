#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "cdfpen/penalties.hpp"

namespace cdfpen {

struct KernelParameterization {
  Eigen::MatrixXd basis;  // N x d, orthonormal columns spanning Ker(A)
  Eigen::Index dim() const { return basis.cols(); }
};

// Orthonormal null-space basis via SVD; singular values below
// 1e-10 * sigma_max are treated as zero.
KernelParameterization kernel_basis(const Eigen::MatrixXd& A);

struct GnspVerdict {
  bool falsified = false;
  // present when falsified: the witness kernel vector and its support set
  std::optional<Eigen::VectorXd> witness;
  std::vector<int> support;
  int samples_used = 0;
};

// Samples kernel vectors (uniform on the unit sphere in kernel coordinates,
// plus the +/- basis vectors) and tests the null-space inequality on the
// worst-case support (the s largest magnitudes).  A NOT_FALSIFIED verdict is
// evidence only, never a certificate.
GnspVerdict gnsp_falsify(const Eigen::MatrixXd& A, int s,
                         const PenaltyModel& model, int budget,
                         std::uint64_t rng_seed);

struct DeltaQEstimate {
  double value = 0.0;
  // true when the kernel dimension exceeded the exact-grid regime and the
  // value is only a Monte-Carlo upper estimate of the infimum
  bool upper_bound_only = false;
};

// inf over nonzero kernel v of (||v||_1/||v||_q)^(q/(q-1)); q in (1,inf],
// pass std::numeric_limits<double>::infinity() for q = inf.  Exact-grid mode
// for kernel dimension <= 2, Monte-Carlo upper estimate beyond.
DeltaQEstimate delta_q(const Eigen::MatrixXd& A, double q, int grid);

struct BoundReport {
  double delta_q = 0.0;
  double q = 0.0;
  double alpha_theta = 0.0;   // F^-1(1 - 1/N)
  double s_max = 0.0;         // sparsity threshold 2^(q/(1-q)) * delta_q
  double bound_value = 0.0;
  bool applicable = false;    // s < s_max
};

BoundReport recovery_bound(double delta_q, double q, int N,
                           const PenaltyModel& model, int s);

struct IrwinHallStats {
  double mean = 0.0;
  double variance = 0.0;
  double ks_distance = 0.0;
};

// Draws |x_j| i.i.d. from the model density (by inverse-CDF sampling) and
// compares the law of the resulting penalty value against Irwin-Hall(N).
IrwinHallStats irwin_hall_check(const PenaltyModel& model, int N, int samples,
                                std::uint64_t rng_seed);

// Closed-form Irwin-Hall CDF (alternating sum), reliable for N <= 30.
double irwin_hall_cdf(int N, double t);

// J_theta(x) per theta grid point; theta is the family's natural sweep
// parameter (1/sigma for the exponential, the scale for the others, the shape
// for single-shape families).  Invalid grid points yield NaN markers.
Eigen::VectorXd sparsity_sweep(Family family,
                               const Eigen::Ref<const Eigen::VectorXd>& theta_grid,
                               const Eigen::Ref<const Eigen::VectorXd>& x,
                               double weibull_shape = 1.5);

// Builds the model a sparsity_sweep grid point denotes; throws for families
// without a single sweep parameter.
PenaltyModel model_from_theta(Family family, double theta,
                              double weibull_shape = 1.5);

}  // namespace cdfpen
