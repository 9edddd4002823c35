#include "cdfpen/analysis.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "cdfpen/rng.hpp"

namespace cdfpen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm_q(const Eigen::VectorXd& v, double q) {
  const double vmax = v.lpNorm<Eigen::Infinity>();
  if (std::isinf(q) || vmax == 0.0) return vmax;
  // factor out the max so large q cannot overflow the power sum
  double sum = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j)
    sum += std::pow(std::abs(v[j]) / vmax, q);
  return vmax * std::pow(sum, 1.0 / q);
}

double ratio_pow(const Eigen::VectorXd& v, double q) {
  const double e = std::isinf(q) ? 1.0 : q / (q - 1.0);
  return std::pow(v.lpNorm<1>() / norm_q(v, q), e);
}

// random point on the unit sphere in d coordinates
Eigen::VectorXd sphere_sample(Rng& rng, Eigen::Index d) {
  Eigen::VectorXd c(d);
  double n2;
  do {
    for (Eigen::Index i = 0; i < d; ++i) c[i] = rng.normal();
    n2 = c.norm();
  } while (n2 == 0.0);
  return c / n2;
}

// indices of the s largest magnitudes
std::vector<int> top_support(const Eigen::VectorXd& v, int s) {
  std::vector<int> idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + s, idx.end(),
                    [&](int a, int b) { return std::abs(v[a]) > std::abs(v[b]); });
  idx.resize(static_cast<std::size_t>(s));
  return idx;
}

}  // namespace

KernelParameterization kernel_basis(const Eigen::MatrixXd& A) {
  if (A.size() == 0 || A.isZero(0.0))
    throw std::invalid_argument("kernel_basis: A must be nonzero");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const double thresh = 1e-10 * svd.singularValues()[0];
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > thresh) ++rank;
  const Eigen::Index n = A.cols();
  KernelParameterization kp;
  kp.basis = svd.matrixV().rightCols(n - rank);
  return kp;
}

GnspVerdict gnsp_falsify(const Eigen::MatrixXd& A, int s,
                         const PenaltyModel& model, int budget,
                         std::uint64_t rng_seed) {
  const Eigen::Index n = A.cols();
  if (s < 1 || s > n) throw std::invalid_argument("gnsp_falsify: s out of range");
  if (budget < 0) throw std::invalid_argument("gnsp_falsify: negative budget");

  const KernelParameterization kp = kernel_basis(A);
  const Eigen::Index d = kp.dim();
  GnspVerdict verdict;
  if (d == 0) return verdict;  // empty kernel: trivially not falsified

  Rng rng(rng_seed);
  auto check = [&](const Eigen::VectorXd& coords) -> bool {
    const Eigen::VectorXd v = kp.basis * coords;
    ++verdict.samples_used;
    const auto support = top_support(v, s);
    Eigen::VectorXd v_on = Eigen::VectorXd::Zero(n);
    for (int j : support) v_on[j] = v[j];
    const Eigen::VectorXd v_off = v - v_on;
    if (penalty(model, v_on) >= penalty(model, v_off)) {
      verdict.falsified = true;
      verdict.witness = v;
      verdict.support = support;
      return true;
    }
    return false;
  };

  for (Eigen::Index i = 0; i < d; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    e[i] = 1.0;
    if (check(e)) return verdict;
    e[i] = -1.0;
    if (check(e)) return verdict;
  }
  for (int it = 0; it < budget; ++it)
    if (check(sphere_sample(rng, d))) return verdict;
  return verdict;
}

DeltaQEstimate delta_q(const Eigen::MatrixXd& A, double q, int grid) {
  if (!(q > 1.0)) throw std::invalid_argument("delta_q: q must lie in (1,inf]");
  if (grid < 1) throw std::invalid_argument("delta_q: grid must be positive");

  const KernelParameterization kp = kernel_basis(A);
  const Eigen::Index d = kp.dim();
  DeltaQEstimate est;
  if (d == 0) {
    est.value = kInf;
    return est;
  }
  if (d == 1) {
    est.value = ratio_pow(kp.basis.col(0), q);
    return est;
  }
  if (d == 2) {
    const double pi = 3.14159265358979323846;
    auto at = [&](double phi) {
      return ratio_pow(std::cos(phi) * kp.basis.col(0) +
                           std::sin(phi) * kp.basis.col(1),
                       q);
    };
    // ratio is antipodally symmetric, so [0, pi) covers every ray
    double best_phi = 0.0, best = at(0.0);
    for (int i = 1; i < grid; ++i) {
      const double phi = pi * i / grid;
      const double r = at(phi);
      if (r < best) { best = r; best_phi = phi; }
    }
    // golden-section refinement around the best cell
    const double gr = 0.6180339887498949;
    double a = best_phi - pi / grid, b = best_phi + pi / grid;
    double c = b - gr * (b - a), e = a + gr * (b - a);
    double fc = at(c), fe = at(e);
    for (int it = 0; it < 80; ++it) {
      if (fc < fe) {
        b = e; e = c; fe = fc;
        c = b - gr * (b - a); fc = at(c);
      } else {
        a = c; c = e; fc = fe;
        e = a + gr * (b - a); fe = at(e);
      }
    }
    est.value = std::min({best, fc, fe});
    return est;
  }

  // d >= 3: Monte-Carlo minimum over random kernel directions; an upper
  // estimate of the infimum only
  Rng rng(0x9d2c5680cafe1234ULL);
  const int samples = std::max(grid, 10000);
  double best = kInf;
  for (int it = 0; it < samples; ++it)
    best = std::min(best, ratio_pow(kp.basis * sphere_sample(rng, d), q));
  est.value = best;
  est.upper_bound_only = true;
  return est;
}

BoundReport recovery_bound(double delta_q, double q, int N,
                           const PenaltyModel& model, int s) {
  if (!(q > 1.0)) throw std::invalid_argument("recovery_bound: q must lie in (1,inf]");
  if (N < 1) throw std::invalid_argument("recovery_bound: N must be positive");
  if (s < 1) throw std::invalid_argument("recovery_bound: s must be positive");

  const double e = std::isinf(q) ? 1.0 : 1.0 - 1.0 / q;
  const double denom =
      std::pow(delta_q, e) - std::pow(std::ceil(delta_q - 1.0), e);
  if (!(denom > 0.0))
    throw std::domain_error("recovery_bound: degenerate bound, "
                            "Delta_q^(1-1/q) - ceil(Delta_q-1)^(1-1/q) <= 0");

  BoundReport report;
  report.delta_q = delta_q;
  report.q = q;
  report.alpha_theta = inverse_cdf(model, 1.0 - 1.0 / N);
  report.s_max = (std::isinf(q) ? 0.5 : std::pow(2.0, q / (1.0 - q))) * delta_q;
  report.bound_value = N * report.alpha_theta / denom;
  report.applicable = s < report.s_max;
  return report;
}

double irwin_hall_cdf(int N, double t) {
  if (N < 1 || N > 30)
    throw std::invalid_argument("irwin_hall_cdf: N must lie in [1,30]");
  if (t <= 0.0) return 0.0;
  if (t >= N) return 1.0;
  // the alternating sum cancels catastrophically in the upper tail; reflect
  // through the N/2 symmetry so it is only ever evaluated on [0, N/2]
  if (t > 0.5 * N) return 1.0 - irwin_hall_cdf(N, N - t);
  double sum = 0.0;
  double binom = 1.0;  // C(N,k)
  const int kmax = static_cast<int>(std::floor(t));
  for (int k = 0; k <= kmax; ++k) {
    sum += (k % 2 == 0 ? 1.0 : -1.0) * binom * std::pow(t - k, N);
    binom *= static_cast<double>(N - k) / (k + 1);
  }
  return sum / std::tgamma(N + 1.0);
}

IrwinHallStats irwin_hall_check(const PenaltyModel& model, int N, int samples,
                                std::uint64_t rng_seed) {
  if (model.family() == Family::DiracDelta)
    throw std::invalid_argument("irwin_hall_check: dirac is not samplable");
  if (N < 1 || samples < 1)
    throw std::invalid_argument("irwin_hall_check: N and samples must be positive");

  Rng rng(rng_seed);
  std::vector<double> draws(static_cast<std::size_t>(samples));
  Eigen::VectorXd x(N);
  for (auto& value : draws) {
    for (int j = 0; j < N; ++j) x[j] = inverse_cdf(model, rng.uniform());
    value = penalty(model, x);
  }

  IrwinHallStats stats;
  const double n = static_cast<double>(samples);
  for (double v : draws) stats.mean += v;
  stats.mean /= n;
  for (double v : draws) stats.variance += (v - stats.mean) * (v - stats.mean);
  stats.variance /= (n - 1.0);

  std::sort(draws.begin(), draws.end());
  double d = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double F = irwin_hall_cdf(N, draws[static_cast<std::size_t>(i)]);
    d = std::max(d, std::abs(F - (i + 1) / n));
    d = std::max(d, std::abs(F - i / n));
  }
  stats.ks_distance = d;
  return stats;
}

PenaltyModel model_from_theta(Family family, double theta, double weibull_shape) {
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw std::invalid_argument("model_from_theta: theta must be positive");
  switch (family) {
    case Family::Exponential:    return PenaltyModel::exponential(1.0 / theta);
    case Family::Rayleigh:       return PenaltyModel::rayleigh(theta);
    case Family::Weibull:        return PenaltyModel::weibull(weibull_shape, theta);
    case Family::Uniform:        return PenaltyModel::uniform(theta);
    case Family::UQuadratic:     return PenaltyModel::uquadratic(theta);
    case Family::ChiSquared:     return PenaltyModel::chi_squared(theta);
    case Family::FoldedNormal:   return PenaltyModel::folded_normal(theta);
    case Family::FoldedStudentT: return PenaltyModel::folded_student_t(theta);
    default:
      throw std::invalid_argument(
          std::string("sparsity_sweep: no single sweep parameter for '") +
          family_name(family) + "'");
  }
}

Eigen::VectorXd sparsity_sweep(Family family,
                               const Eigen::Ref<const Eigen::VectorXd>& theta_grid,
                               const Eigen::Ref<const Eigen::VectorXd>& x,
                               double weibull_shape) {
  Eigen::VectorXd out(theta_grid.size());
  for (Eigen::Index i = 0; i < theta_grid.size(); ++i) {
    try {
      out[i] = penalty(model_from_theta(family, theta_grid[i], weibull_shape), x);
    } catch (const std::invalid_argument&) {
      if (!(theta_grid[i] > 0.0)) {
        out[i] = std::numeric_limits<double>::quiet_NaN();  // per-point marker
      } else {
        throw;  // family itself is unsupported, not a bad grid point
      }
    }
  }
  return out;
}

}  // namespace cdfpen
