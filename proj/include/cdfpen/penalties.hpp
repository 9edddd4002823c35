#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdfpen {

enum class Family {
  DiracDelta,
  Uniform,
  ScadLinear,
  McpLinear,
  UQuadratic,
  Exponential,
  Rayleigh,
  Weibull,
  ChiSquared,
  GeneralizedGamma,
  GeneralizedBetaPrime,
  FoldedNormal,
  FoldedStudentT,
  FoldedCauchy,
};

enum class Concavity { Concave, NotConcave };

// Error thrown when a weight is requested at a point where the density
// diverges and no smoothing was supplied.
class SingularWeightError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Parse failure for penalty specification strings; carries the byte offset
// where parsing stopped.
class SpecParseError : public std::runtime_error {
 public:
  SpecParseError(const std::string& msg, std::size_t position)
      : std::runtime_error(msg), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// A density on [0,inf) together with its family tag.  The induced penalty is
// the sum of the CDF over entry magnitudes.  Immutable after construction;
// parameter validity is checked up front.
class PenaltyModel {
 public:
  static PenaltyModel dirac();
  static PenaltyModel uniform(double gamma);
  static PenaltyModel scad(double lam, double gamma);
  static PenaltyModel mcp(double lam, double gamma);
  static PenaltyModel uquadratic(double b);
  static PenaltyModel exponential(double sigma);
  static PenaltyModel rayleigh(double sigma);
  static PenaltyModel weibull(double k, double sigma);
  static PenaltyModel chi_squared(double k);
  static PenaltyModel generalized_gamma(double a, double d, double p);
  static PenaltyModel generalized_beta_prime(double p, double q, double alpha,
                                             double beta);
  static PenaltyModel folded_normal(double sigma);
  static PenaltyModel folded_student_t(double nu);
  static PenaltyModel folded_cauchy();

  Family family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  Concavity concavity() const { return concavity_; }

  // true when the density is unbounded at 0 (e.g. Weibull k<1), so IRL1
  // weights need eps smoothing there
  bool divergent_at_zero() const { return divergent_at_zero_; }

  // canonical spec string, e.g. "weibull(k=0.5,sigma=1)"
  std::string spec() const;

 private:
  PenaltyModel(Family family, std::vector<double> params);

  Family family_;
  std::vector<double> params_;
  Concavity concavity_;
  bool divergent_at_zero_;
};

// Density value f_theta(t), t >= 0.  DiracDelta has no density and throws.
double pdf(const PenaltyModel& model, double t);

// CDF value F_theta(t) in [0,1].  Closed form where one exists, adaptive
// Simpson quadrature (abs tol 1e-10) otherwise.
double cdf(const PenaltyModel& model, double t);

// Quantile: t with |cdf(t) - prob| <= 1e-10, prob in [0,1).
double inverse_cdf(const PenaltyModel& model, double prob);

// Separable penalty sum_j F_theta(|x_j|); lies in [0, ||x||_0].
double penalty(const PenaltyModel& model,
               const Eigen::Ref<const Eigen::VectorXd>& x);

// IRL1 weight f_theta(t + eps).  Throws SingularWeightError when t + eps = 0
// and the density diverges at 0.
double irl1_weight(const PenaltyModel& model, double t, double eps);

// cdf(t)/cdf(1) over a nonnegative grid, normalized to pass through (1,1).
Eigen::VectorXd scaled_penalty_curve(const PenaltyModel& model,
                                     const Eigen::Ref<const Eigen::VectorXd>& grid);

// Parses "family(name=value,...)", e.g. "weibull(k=0.5,sigma=1)",
// "exp(sigma=1)", "scad(lam=1,gamma=3.7)".  Throws SpecParseError.
PenaltyModel parse_penalty_spec(const std::string& text);

const char* family_name(Family family);

// Family tag from its spec name (e.g. "weibull", "exp"); throws SpecParseError.
Family parse_family(const std::string& name);

}  // namespace cdfpen
