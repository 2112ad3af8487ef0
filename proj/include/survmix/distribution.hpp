#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "survmix/random.hpp"

namespace survmix {

// The four parametric survival families. All use the rate parameterization:
// the rate lambda multiplies t^k directly (Weibull survival exp(-lambda t^k),
// log-logistic survival 1/(1 + lambda t^k)), not the scale form
// exp(-(t/scale)^k) — scale = lambda^(-1/k) if you need to convert.
enum class Family { Exponential, Weibull, LogLogistic, LogNormal };

// A family plus its parameter vector:
//   Exponential  {rate}
//   Weibull      {shape, rate}
//   LogLogistic  {shape, rate}
//   LogNormal    {log-mean mu, log-sd sigma}
struct DistributionSpec {
  Family family = Family::Exponential;
  std::vector<double> params;
};

DistributionSpec exponential(double rate);
DistributionSpec weibull(double shape, double rate);
DistributionSpec log_logistic(double shape, double rate);
DistributionSpec log_normal(double mu, double sigma);

// Number of parameters for the family (1, 2, 2, 2).
int param_count(Family family);

const char* family_name(Family family);
// Parses "exponential", "weibull", "loglogistic", "lognormal" (exact,
// lowercase); throws usage_error otherwise.
Family family_from_name(const std::string& name);

// Throws parameter_error unless the vector length matches the family and all
// positivity constraints hold (rates, shapes, sigma > 0; mu unrestricted).
void validate(const DistributionSpec& spec);

// Density and distribution functions. pdf/log_pdf require t > 0 (the Weibull
// density with k < 1 diverges at 0); survival/cdf accept t = 0.
double pdf(const DistributionSpec& spec, double t);
double log_pdf(const DistributionSpec& spec, double t);
double cdf(const DistributionSpec& spec, double t);
double survival(const DistributionSpec& spec, double t);
double log_survival(const DistributionSpec& spec, double t);
double hazard(const DistributionSpec& spec, double t);

// Inverse CDF; p must lie strictly inside (0,1).
double quantile(const DistributionSpec& spec, double p);
double median(const DistributionSpec& spec);

// Inverse-CDF sampling: consumes exactly one uniform per draw.
double sample_one(const DistributionSpec& spec, RandomStream& rng);
std::vector<double> sample(const DistributionSpec& spec, std::size_t n,
                           RandomStream& rng);

// Hot-path forms used by the likelihood loops: parameters passed raw and
// log(t) precomputed by the caller. No validation — callers validate specs
// once up front. Both return -inf rather than throwing when the parameters
// wander somewhere indefensible (the optimizer treats that as a reject).
double log_pdf_raw(Family family, const double* p, double t, double log_t);
double log_survival_raw(Family family, const double* p, double t,
                        double log_t);

}  // namespace survmix
