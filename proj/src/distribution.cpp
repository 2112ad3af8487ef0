#include "survmix/distribution.hpp"

#include <cmath>
#include <limits>

#include "survmix/error.hpp"
#include "survmix/special.hpp"

namespace survmix {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kHalfLog2Pi = 0.91893853320467274178;  // log(2*pi)/2
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

DistributionSpec exponential(double rate) {
  DistributionSpec s{Family::Exponential, {rate}};
  validate(s);
  return s;
}

DistributionSpec weibull(double shape, double rate) {
  DistributionSpec s{Family::Weibull, {shape, rate}};
  validate(s);
  return s;
}

DistributionSpec log_logistic(double shape, double rate) {
  DistributionSpec s{Family::LogLogistic, {shape, rate}};
  validate(s);
  return s;
}

DistributionSpec log_normal(double mu, double sigma) {
  DistributionSpec s{Family::LogNormal, {mu, sigma}};
  validate(s);
  return s;
}

int param_count(Family family) {
  return family == Family::Exponential ? 1 : 2;
}

const char* family_name(Family family) {
  switch (family) {
    case Family::Exponential: return "exponential";
    case Family::Weibull: return "weibull";
    case Family::LogLogistic: return "loglogistic";
    case Family::LogNormal: return "lognormal";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "exponential") return Family::Exponential;
  if (name == "weibull") return Family::Weibull;
  if (name == "loglogistic") return Family::LogLogistic;
  if (name == "lognormal") return Family::LogNormal;
  throw usage_error("unknown distribution family '" + name +
                    "' (expected exponential, weibull, loglogistic or "
                    "lognormal)");
}

void validate(const DistributionSpec& spec) {
  const auto& p = spec.params;
  if (static_cast<int>(p.size()) != param_count(spec.family)) {
    throw parameter_error("distribution parameter vector has wrong length");
  }
  for (double v : p) {
    if (!std::isfinite(v)) {
      throw parameter_error("distribution parameter is not finite");
    }
  }
  switch (spec.family) {
    case Family::Exponential:
      if (!(p[0] > 0.0)) throw parameter_error("exponential: rate must be > 0");
      break;
    case Family::Weibull:
      if (!(p[0] > 0.0) || !(p[1] > 0.0)) {
        throw parameter_error("weibull: shape and rate must be > 0");
      }
      break;
    case Family::LogLogistic:
      if (!(p[0] > 0.0) || !(p[1] > 0.0)) {
        throw parameter_error("loglogistic: shape and rate must be > 0");
      }
      break;
    case Family::LogNormal:
      if (!(p[1] > 0.0)) throw parameter_error("lognormal: sigma must be > 0");
      break;
  }
}

double log_pdf_raw(Family family, const double* p, double t, double log_t) {
  switch (family) {
    case Family::Exponential:
      return std::log(p[0]) - p[0] * t;
    case Family::Weibull: {
      const double k = p[0], lam = p[1];
      return std::log(k) + std::log(lam) + (k - 1.0) * log_t -
             lam * std::exp(k * log_t);
    }
    case Family::LogLogistic: {
      // With L = log(lambda) + k log(t): log f = log k + L - log t - 2
      // softplus(L), which never overflows however large lambda t^k gets.
      const double k = p[0], lam = p[1];
      const double L = std::log(lam) + k * log_t;
      return std::log(k) + L - log_t - 2.0 * softplus(L);
    }
    case Family::LogNormal: {
      const double z = (log_t - p[0]) / p[1];
      return -log_t - std::log(p[1]) - kHalfLog2Pi - 0.5 * z * z;
    }
  }
  return -kInf;
}

double log_survival_raw(Family family, const double* p, double t,
                        double log_t) {
  switch (family) {
    case Family::Exponential:
      return -p[0] * t;
    case Family::Weibull:
      return -p[1] * std::exp(p[0] * log_t);
    case Family::LogLogistic:
      return -softplus(std::log(p[1]) + p[0] * log_t);
    case Family::LogNormal:
      return log_std_normal_sf((log_t - p[0]) / p[1]);
  }
  return -kInf;
}

double log_pdf(const DistributionSpec& spec, double t) {
  validate(spec);
  if (!(t > 0.0)) throw domain_error("log_pdf: t must be > 0");
  return log_pdf_raw(spec.family, spec.params.data(), t, std::log(t));
}

double pdf(const DistributionSpec& spec, double t) {
  return std::exp(log_pdf(spec, t));
}

double log_survival(const DistributionSpec& spec, double t) {
  validate(spec);
  if (!(t >= 0.0)) throw domain_error("log_survival: t must be >= 0");
  if (t == 0.0) return 0.0;
  return log_survival_raw(spec.family, spec.params.data(), t, std::log(t));
}

double survival(const DistributionSpec& spec, double t) {
  return std::exp(log_survival(spec, t));
}

double cdf(const DistributionSpec& spec, double t) {
  // For the sizes of t we deal with, 1 - S loses at most ~1 ulp; the
  // survival side is the one that needs tail care.
  return 1.0 - survival(spec, t);
}

double hazard(const DistributionSpec& spec, double t) {
  validate(spec);
  if (!(t > 0.0)) throw domain_error("hazard: t must be > 0");
  const double log_t = std::log(t);
  return std::exp(log_pdf_raw(spec.family, spec.params.data(), t, log_t) -
                  log_survival_raw(spec.family, spec.params.data(), t, log_t));
}

double quantile(const DistributionSpec& spec, double p) {
  validate(spec);
  if (!(p > 0.0 && p < 1.0)) {
    throw domain_error("quantile: p must lie in (0,1)");
  }
  const auto& par = spec.params;
  switch (spec.family) {
    case Family::Exponential:
      return -std::log1p(-p) / par[0];
    case Family::Weibull:
      return std::pow(-std::log1p(-p) / par[1], 1.0 / par[0]);
    case Family::LogLogistic:
      // S(t) = 1/(1 + lambda t^k) = 1-p  =>  t = (p / ((1-p) lambda))^(1/k).
      return std::pow(p / ((1.0 - p) * par[1]), 1.0 / par[0]);
    case Family::LogNormal:
      return std::exp(par[0] + par[1] * std_normal_quantile(p));
  }
  return 0.0;
}

double median(const DistributionSpec& spec) {
  validate(spec);
  const auto& p = spec.params;
  switch (spec.family) {
    case Family::Exponential: return kLn2 / p[0];
    case Family::Weibull: return std::pow(kLn2 / p[1], 1.0 / p[0]);
    case Family::LogLogistic: return std::pow(p[1], -1.0 / p[0]);
    case Family::LogNormal: return std::exp(p[0]);
  }
  return 0.0;
}

double sample_one(const DistributionSpec& spec, RandomStream& rng) {
  return quantile(spec, rng.uniform());
}

std::vector<double> sample(const DistributionSpec& spec, std::size_t n,
                           RandomStream& rng) {
  validate(spec);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample_one(spec, rng));
  return out;
}

}  // namespace survmix
