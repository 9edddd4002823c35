#include "cdfpen/penalties.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>

namespace cdfpen {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kQuadTol = 1e-10;

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double lbeta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// log(1 + e^L), stable for large L
double log1p_exp(double L) {
  if (L > 30.0) return L + std::log1p(std::exp(-L));
  return std::log1p(std::exp(L));
}

Concavity classify(Family family, const std::vector<double>& p) {
  switch (family) {
    case Family::Uniform:
    case Family::ScadLinear:
    case Family::McpLinear:
    case Family::Exponential:
    case Family::FoldedNormal:
    case Family::FoldedStudentT:
    case Family::FoldedCauchy:
      return Concavity::Concave;  // density non-increasing for all parameters
    case Family::Weibull:
      return p[0] <= 1.0 ? Concavity::Concave : Concavity::NotConcave;
    case Family::ChiSquared:
      return p[0] <= 1.0 ? Concavity::Concave : Concavity::NotConcave;
    case Family::GeneralizedGamma:
      return p[1] <= 1.0 ? Concavity::Concave : Concavity::NotConcave;
    case Family::GeneralizedBetaPrime:
      return p[2] * p[0] <= 1.0 ? Concavity::Concave : Concavity::NotConcave;
    case Family::Rayleigh:
    case Family::UQuadratic:
    case Family::DiracDelta:
      return Concavity::NotConcave;
  }
  return Concavity::NotConcave;
}

bool diverges_at_zero(Family family, const std::vector<double>& p) {
  switch (family) {
    case Family::Weibull:            return p[0] < 1.0;
    case Family::ChiSquared:         return p[0] < 1.0;
    case Family::GeneralizedGamma:   return p[1] < 1.0;
    case Family::GeneralizedBetaPrime: return p[2] * p[0] < 1.0;
    default:                         return false;
  }
}

// Exponent s such that pdf(t) ~ c * t^(s-1) as t -> 0+, used to regularize
// the quadrature near an integrable singularity.
double zero_exponent(Family family, const std::vector<double>& p) {
  switch (family) {
    case Family::ChiSquared:           return p[0];
    case Family::GeneralizedGamma:     return p[1];
    case Family::GeneralizedBetaPrime: return p[2] * p[0];
    default:                           return 1.0;
  }
}

// Leading coefficient c in pdf(t) ~ c * t^(s-1) as t -> 0+.
double zero_coefficient(Family family, const std::vector<double>& p) {
  switch (family) {
    case Family::ChiSquared: {
      const double k = p[0];
      return std::exp(-(k / 2.0 - 1.0) * std::log(2.0) - std::lgamma(k / 2.0));
    }
    case Family::GeneralizedGamma: {
      const double a = p[0], d = p[1], pp = p[2];
      return std::exp(std::log(pp) - d * std::log(a) - std::lgamma(d / pp));
    }
    case Family::GeneralizedBetaPrime: {
      const double pp = p[0], q = p[1], alpha = p[2], beta = p[3];
      return std::exp(std::log(pp) - alpha * pp * std::log(q) -
                      lbeta(alpha, beta));
    }
    default:
      return 0.0;
  }
}

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa,
                            double fm, double fb, double whole, double tol,
                            int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  // split into a few panels up front so widely separated features are seen
  const int panels = 8;
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double x0 = a + i * h, x1 = x0 + h, xm = 0.5 * (x0 + x1);
    const double f0 = f(x0), f1 = f(x1), fm = f(xm);
    total += adaptive_simpson_rec(f, x0, x1, f0, fm, f1,
                                  simpson(f0, fm, f1, h), tol / panels, 48);
  }
  return total;
}

double pdf_impl(Family family, const std::vector<double>& p, double t);

// Quadrature CDF with the substitution x = u^(1/s) flattening the t^(s-1)
// endpoint singularity.
double cdf_quadrature(Family family, const std::vector<double>& p, double t) {
  const double s = std::min(zero_exponent(family, p), 1.0);
  const double c0 = zero_coefficient(family, p);
  auto integrand = [&](double u) -> double {
    if (u <= 0.0) return s < 1.0 ? c0 / s : pdf_impl(family, p, 0.0);
    const double x = std::pow(u, 1.0 / s);
    return pdf_impl(family, p, x) * std::pow(u, 1.0 / s - 1.0) / s;
  };
  const double upper = std::pow(t, s);
  const double v = adaptive_simpson(integrand, 0.0, upper, kQuadTol);
  return std::clamp(v, 0.0, 1.0);
}

double pdf_impl(Family family, const std::vector<double>& p, double t) {
  switch (family) {
    case Family::DiracDelta:
      throw std::domain_error("dirac: pdf is not defined (evaluation-only family)");
    case Family::Uniform: {
      const double gamma = p[0];
      return t <= gamma ? 1.0 / gamma : 0.0;
    }
    case Family::ScadLinear: {
      const double lam = p[0], gamma = p[1];
      const double c = 2.0 / (lam * (gamma + 1.0));
      if (t <= lam) return c;
      if (t <= lam * gamma)
        return c * (1.0 - (t - lam) / (lam * (gamma - 1.0)));
      return 0.0;
    }
    case Family::McpLinear: {
      const double lam = p[0], gamma = p[1];
      const double b = lam * gamma;
      return t <= b ? 2.0 / b * (1.0 - t / b) : 0.0;
    }
    case Family::UQuadratic: {
      const double b = p[0], beta = 0.5 * b, alpha = 12.0 / (b * b * b);
      return t <= b ? alpha * (t - beta) * (t - beta) : 0.0;
    }
    case Family::Exponential: {
      const double s = p[0];
      return std::exp(-t / s) / s;
    }
    case Family::Rayleigh: {
      const double s = p[0];
      return t / (s * s) * std::exp(-t * t / (2.0 * s * s));
    }
    case Family::Weibull: {
      const double k = p[0], s = p[1];
      if (t == 0.0) {
        if (k < 1.0) return std::numeric_limits<double>::infinity();
        return k == 1.0 ? 1.0 / s : 0.0;
      }
      const double z = t / s;
      return k / s * std::pow(z, k - 1.0) * std::exp(-std::pow(z, k));
    }
    case Family::ChiSquared: {
      const double k = p[0];
      if (t == 0.0) {
        if (k < 1.0) return std::numeric_limits<double>::infinity();
        return k == 1.0 ? zero_coefficient(family, p) : 0.0;
      }
      return std::exp((k - 1.0) * std::log(t) - t * t / 2.0 -
                      (k / 2.0 - 1.0) * std::log(2.0) - std::lgamma(k / 2.0));
    }
    case Family::GeneralizedGamma: {
      const double a = p[0], d = p[1], pp = p[2];
      if (t == 0.0) {
        if (d < 1.0) return std::numeric_limits<double>::infinity();
        return d == 1.0 ? zero_coefficient(family, p) : 0.0;
      }
      return std::exp(std::log(pp) - d * std::log(a) + (d - 1.0) * std::log(t) -
                      std::pow(t / a, pp) - std::lgamma(d / pp));
    }
    case Family::GeneralizedBetaPrime: {
      const double pp = p[0], q = p[1], alpha = p[2], beta = p[3];
      const double s = alpha * pp;
      if (t == 0.0) {
        if (s < 1.0) return std::numeric_limits<double>::infinity();
        return s == 1.0 ? zero_coefficient(family, p) : 0.0;
      }
      const double L = pp * std::log(t / q);
      return std::exp(std::log(pp) + (s - 1.0) * std::log(t / q) -
                      (alpha + beta) * log1p_exp(L) - std::log(q) -
                      lbeta(alpha, beta));
    }
    case Family::FoldedNormal: {
      const double s = p[0];
      return std::sqrt(2.0 / kPi) / s * std::exp(-t * t / (2.0 * s * s));
    }
    case Family::FoldedStudentT: {
      const double nu = p[0];
      const double logc = std::log(2.0) + std::lgamma(0.5 * (nu + 1.0)) -
                          0.5 * std::log(nu * kPi) - std::lgamma(0.5 * nu);
      return std::exp(logc - 0.5 * (nu + 1.0) * std::log1p(t * t / nu));
    }
    case Family::FoldedCauchy:
      return 2.0 / (kPi * (1.0 + t * t));
  }
  return 0.0;
}

bool has_closed_form_cdf(Family family) {
  switch (family) {
    case Family::ChiSquared:
    case Family::GeneralizedGamma:
    case Family::GeneralizedBetaPrime:
    case Family::FoldedStudentT:
      return false;
    default:
      return true;
  }
}

double cdf_impl(Family family, const std::vector<double>& p, double t) {
  switch (family) {
    case Family::DiracDelta:
      return t > 0.0 ? 1.0 : 0.0;
    case Family::Uniform:
      return std::min(t / p[0], 1.0);
    case Family::ScadLinear: {
      const double lam = p[0], gamma = p[1];
      const double c = 2.0 / (lam * (gamma + 1.0));
      if (t <= lam) return c * t;
      if (t <= lam * gamma) {
        const double u = t - lam;
        return c * (lam + u - u * u / (2.0 * lam * (gamma - 1.0)));
      }
      return 1.0;
    }
    case Family::McpLinear: {
      const double b = p[0] * p[1];
      return t <= b ? 2.0 / b * (t - t * t / (2.0 * b)) : 1.0;
    }
    case Family::UQuadratic: {
      const double b = p[0], beta = 0.5 * b, alpha = 12.0 / (b * b * b);
      if (t >= b) return 1.0;
      const double d = t - beta;
      return alpha * (d * d * d + beta * beta * beta) / 3.0;
    }
    case Family::Exponential:
      return -std::expm1(-t / p[0]);
    case Family::Rayleigh:
      return -std::expm1(-t * t / (2.0 * p[0] * p[0]));
    case Family::Weibull:
      return -std::expm1(-std::pow(t / p[1], p[0]));
    case Family::FoldedNormal:
      return std::erf(t / (std::sqrt(2.0) * p[0]));
    case Family::FoldedCauchy:
      return 2.0 / kPi * std::atan(t);
    default:
      return cdf_quadrature(family, p, t);
  }
}

bool bounded_support(Family family, const std::vector<double>& p, double* b) {
  switch (family) {
    case Family::Uniform:    *b = p[0]; return true;
    case Family::ScadLinear: *b = p[0] * p[1]; return true;
    case Family::McpLinear:  *b = p[0] * p[1]; return true;
    case Family::UQuadratic: *b = p[0]; return true;
    default:                 return false;
  }
}

double inverse_cdf_bisect(Family family, const std::vector<double>& p,
                          double prob) {
  if (prob == 0.0) return 0.0;
  double lo = 0.0, hi;
  if (!bounded_support(family, p, &hi)) {
    hi = 1.0;
    while (cdf_impl(family, p, hi) < prob) {
      hi *= 2.0;
      if (hi > 1e300) throw std::runtime_error("inverse_cdf: bracket overflow");
    }
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double c = cdf_impl(family, p, mid);
    if (std::abs(c - prob) <= 1e-11) break;
    (c < prob ? lo : hi) = mid;
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
  }
  return mid;
}

std::string fmt_param(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // trim to the shortest representation that round-trips
  for (int prec = 1; prec < 17; ++prec) {
    char tmp[40];
    std::snprintf(tmp, sizeof(tmp), "%.*g", prec, v);
    if (std::strtod(tmp, nullptr) == v) return tmp;
  }
  return buf;
}

}  // namespace

PenaltyModel::PenaltyModel(Family family, std::vector<double> params)
    : family_(family),
      params_(std::move(params)),
      concavity_(classify(family, params_)),
      divergent_at_zero_(diverges_at_zero(family, params_)) {}

PenaltyModel PenaltyModel::dirac() { return PenaltyModel(Family::DiracDelta, {}); }

PenaltyModel PenaltyModel::uniform(double gamma) {
  require(gamma > 0.0, "uniform: gamma must be > 0");
  return PenaltyModel(Family::Uniform, {gamma});
}

PenaltyModel PenaltyModel::scad(double lam, double gamma) {
  require(lam > 0.0, "scad: lam must be > 0");
  require(gamma > 1.0, "scad: gamma must be > 1");
  return PenaltyModel(Family::ScadLinear, {lam, gamma});
}

PenaltyModel PenaltyModel::mcp(double lam, double gamma) {
  require(lam > 0.0, "mcp: lam must be > 0");
  require(gamma > 0.0, "mcp: gamma must be > 0");
  return PenaltyModel(Family::McpLinear, {lam, gamma});
}

PenaltyModel PenaltyModel::uquadratic(double b) {
  require(b > 0.0, "uquad: b must be > 0");
  return PenaltyModel(Family::UQuadratic, {b});
}

PenaltyModel PenaltyModel::exponential(double sigma) {
  require(sigma > 0.0, "exp: sigma must be > 0");
  return PenaltyModel(Family::Exponential, {sigma});
}

PenaltyModel PenaltyModel::rayleigh(double sigma) {
  require(sigma > 0.0, "rayleigh: sigma must be > 0");
  return PenaltyModel(Family::Rayleigh, {sigma});
}

PenaltyModel PenaltyModel::weibull(double k, double sigma) {
  require(k > 0.0, "weibull: k must be > 0");
  require(sigma > 0.0, "weibull: sigma must be > 0");
  return PenaltyModel(Family::Weibull, {k, sigma});
}

PenaltyModel PenaltyModel::chi_squared(double k) {
  require(k > 0.0, "chisq: k must be > 0");
  return PenaltyModel(Family::ChiSquared, {k});
}

PenaltyModel PenaltyModel::generalized_gamma(double a, double d, double p) {
  require(a > 0.0 && d > 0.0 && p > 0.0, "gengamma: a, d, p must be > 0");
  return PenaltyModel(Family::GeneralizedGamma, {a, d, p});
}

PenaltyModel PenaltyModel::generalized_beta_prime(double p, double q,
                                                  double alpha, double beta) {
  require(p > 0.0 && q > 0.0 && alpha > 0.0 && beta > 0.0,
          "gbetaprime: p, q, alpha, beta must be > 0");
  return PenaltyModel(Family::GeneralizedBetaPrime, {p, q, alpha, beta});
}

PenaltyModel PenaltyModel::folded_normal(double sigma) {
  require(sigma > 0.0, "foldednormal: sigma must be > 0");
  return PenaltyModel(Family::FoldedNormal, {sigma});
}

PenaltyModel PenaltyModel::folded_student_t(double nu) {
  require(nu > 0.0, "foldedt: nu must be > 0");
  return PenaltyModel(Family::FoldedStudentT, {nu});
}

PenaltyModel PenaltyModel::folded_cauchy() {
  return PenaltyModel(Family::FoldedCauchy, {});
}

const char* family_name(Family family) {
  switch (family) {
    case Family::DiracDelta:           return "dirac";
    case Family::Uniform:              return "uniform";
    case Family::ScadLinear:           return "scad";
    case Family::McpLinear:            return "mcp";
    case Family::UQuadratic:           return "uquad";
    case Family::Exponential:          return "exp";
    case Family::Rayleigh:             return "rayleigh";
    case Family::Weibull:              return "weibull";
    case Family::ChiSquared:           return "chisq";
    case Family::GeneralizedGamma:     return "gengamma";
    case Family::GeneralizedBetaPrime: return "gbetaprime";
    case Family::FoldedNormal:         return "foldednormal";
    case Family::FoldedStudentT:       return "foldedt";
    case Family::FoldedCauchy:         return "foldedcauchy";
  }
  return "?";
}

namespace {

const std::vector<std::string>& param_names(Family family) {
  static const std::map<Family, std::vector<std::string>> names = {
      {Family::DiracDelta, {}},
      {Family::Uniform, {"gamma"}},
      {Family::ScadLinear, {"lam", "gamma"}},
      {Family::McpLinear, {"lam", "gamma"}},
      {Family::UQuadratic, {"b"}},
      {Family::Exponential, {"sigma"}},
      {Family::Rayleigh, {"sigma"}},
      {Family::Weibull, {"k", "sigma"}},
      {Family::ChiSquared, {"k"}},
      {Family::GeneralizedGamma, {"a", "d", "p"}},
      {Family::GeneralizedBetaPrime, {"p", "q", "alpha", "beta"}},
      {Family::FoldedNormal, {"sigma"}},
      {Family::FoldedStudentT, {"nu"}},
      {Family::FoldedCauchy, {}},
  };
  return names.at(family);
}

PenaltyModel make_model(Family family, const std::vector<double>& p) {
  switch (family) {
    case Family::DiracDelta:   return PenaltyModel::dirac();
    case Family::Uniform:      return PenaltyModel::uniform(p[0]);
    case Family::ScadLinear:   return PenaltyModel::scad(p[0], p[1]);
    case Family::McpLinear:    return PenaltyModel::mcp(p[0], p[1]);
    case Family::UQuadratic:   return PenaltyModel::uquadratic(p[0]);
    case Family::Exponential:  return PenaltyModel::exponential(p[0]);
    case Family::Rayleigh:     return PenaltyModel::rayleigh(p[0]);
    case Family::Weibull:      return PenaltyModel::weibull(p[0], p[1]);
    case Family::ChiSquared:   return PenaltyModel::chi_squared(p[0]);
    case Family::GeneralizedGamma:
      return PenaltyModel::generalized_gamma(p[0], p[1], p[2]);
    case Family::GeneralizedBetaPrime:
      return PenaltyModel::generalized_beta_prime(p[0], p[1], p[2], p[3]);
    case Family::FoldedNormal:  return PenaltyModel::folded_normal(p[0]);
    case Family::FoldedStudentT: return PenaltyModel::folded_student_t(p[0]);
    case Family::FoldedCauchy:  return PenaltyModel::folded_cauchy();
  }
  throw std::invalid_argument("unknown family");
}

}  // namespace

std::string PenaltyModel::spec() const {
  const auto& names = param_names(family_);
  std::ostringstream out;
  out << family_name(family_);
  if (!names.empty()) {
    out << '(';
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) out << ',';
      out << names[i] << '=' << fmt_param(params_[i]);
    }
    out << ')';
  }
  return out.str();
}

double pdf(const PenaltyModel& model, double t) {
  if (!(t >= 0.0)) throw std::domain_error("pdf: t must be >= 0");
  return pdf_impl(model.family(), model.params(), t);
}

double cdf(const PenaltyModel& model, double t) {
  if (!(t >= 0.0)) throw std::domain_error("cdf: t must be >= 0");
  return cdf_impl(model.family(), model.params(), t);
}

double inverse_cdf(const PenaltyModel& model, double prob) {
  if (!(prob >= 0.0 && prob < 1.0))
    throw std::domain_error("inverse_cdf: prob must lie in [0,1)");
  const auto& p = model.params();
  switch (model.family()) {
    case Family::DiracDelta:
      return 0.0;
    case Family::Uniform:
      return prob * p[0];
    case Family::Exponential:
      return -p[0] * std::log1p(-prob);
    case Family::Rayleigh:
      return p[0] * std::sqrt(-2.0 * std::log1p(-prob));
    case Family::Weibull:
      return p[1] * std::pow(-std::log1p(-prob), 1.0 / p[0]);
    case Family::FoldedCauchy:
      return std::tan(prob * kPi / 2.0);
    default:
      return inverse_cdf_bisect(model.family(), p, prob);
  }
}

double penalty(const PenaltyModel& model,
               const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (!x.allFinite()) throw std::domain_error("penalty: non-finite entry");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j)
    sum += cdf(model, std::abs(x[j]));
  return sum;
}

double irl1_weight(const PenaltyModel& model, double t, double eps) {
  if (!(t >= 0.0)) throw std::domain_error("irl1_weight: t must be >= 0");
  if (!(eps >= 0.0)) throw std::domain_error("irl1_weight: eps must be >= 0");
  if (model.family() == Family::DiracDelta)
    throw std::domain_error("dirac: irl1_weight is not defined");
  const double tt = t + eps;
  if (tt == 0.0 && model.divergent_at_zero())
    throw SingularWeightError(
        "irl1_weight: density diverges at 0 for " + model.spec() +
        "; a positive eps is required");
  return pdf(model, tt);
}

Eigen::VectorXd scaled_penalty_curve(
    const PenaltyModel& model, const Eigen::Ref<const Eigen::VectorXd>& grid) {
  const double c1 = cdf(model, 1.0);
  if (!(c1 > 0.0))
    throw std::domain_error("scaled_penalty_curve: cdf(1) = 0, degenerate scale");
  Eigen::VectorXd out(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    out[i] = cdf(model, grid[i]) / c1;
  return out;
}

namespace {

struct Parser {
  const std::string& text;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& expected) const {
    std::ostringstream msg;
    msg << "penalty spec parse error at position " << pos << ": expected "
        << expected;
    throw SpecParseError(msg.str(), pos);
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) { ++pos; return true; }
    return false;
  }

  std::string ident() {
    skip_ws();
    const std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    if (pos == start) fail("identifier");
    return text.substr(start, pos - start);
  }

  double number() {
    skip_ws();
    const char* begin = text.c_str() + pos;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("numeric value");
    pos += static_cast<std::size_t>(end - begin);
    return v;
  }
};

Family family_from_name(const std::string& name, const Parser& p) {
  static const std::map<std::string, Family> lut = {
      {"dirac", Family::DiracDelta},
      {"l0", Family::DiracDelta},
      {"uniform", Family::Uniform},
      {"scad", Family::ScadLinear},
      {"mcp", Family::McpLinear},
      {"uquad", Family::UQuadratic},
      {"exp", Family::Exponential},
      {"exponential", Family::Exponential},
      {"rayleigh", Family::Rayleigh},
      {"weibull", Family::Weibull},
      {"chisq", Family::ChiSquared},
      {"gengamma", Family::GeneralizedGamma},
      {"gbetaprime", Family::GeneralizedBetaPrime},
      {"foldednormal", Family::FoldedNormal},
      {"foldedt", Family::FoldedStudentT},
      {"foldedcauchy", Family::FoldedCauchy},
  };
  const auto it = lut.find(name);
  if (it == lut.end())
    throw SpecParseError("penalty spec parse error at position 0: unknown family '" +
                             name + "'", 0);
  (void)p;
  return it->second;
}

}  // namespace

Family parse_family(const std::string& name) {
  Parser dummy{name};
  return family_from_name(name, dummy);
}

PenaltyModel parse_penalty_spec(const std::string& text) {
  Parser parser{text};
  const std::string name = parser.ident();
  const Family family = family_from_name(name, parser);
  const auto& names = param_names(family);
  std::vector<double> values(names.size(),
                             std::numeric_limits<double>::quiet_NaN());
  if (parser.eat('(')) {
    if (!parser.eat(')')) {
      do {
        const std::size_t arg_pos = parser.pos;
        const std::string key = parser.ident();
        if (!parser.eat('=')) parser.fail("'='");
        const double value = parser.number();
        const auto it = std::find(names.begin(), names.end(), key);
        if (it == names.end()) {
          parser.pos = arg_pos;
          parser.fail("one of the parameter names for '" +
                      std::string(family_name(family)) + "'");
        }
        values[static_cast<std::size_t>(it - names.begin())] = value;
      } while (parser.eat(','));
      if (!parser.eat(')')) parser.fail("',' or ')'");
    }
  }
  parser.skip_ws();
  if (parser.pos != text.size()) parser.fail("end of input");
  for (std::size_t i = 0; i < names.size(); ++i)
    if (std::isnan(values[i]))
      throw SpecParseError("penalty spec parse error at position " +
                               std::to_string(parser.pos) + ": missing parameter '" +
                               names[i] + "' for '" + family_name(family) + "'",
                           parser.pos);
  return make_model(family, values);
}

}  // namespace cdfpen
