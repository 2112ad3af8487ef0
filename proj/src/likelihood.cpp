#include "survmix/likelihood.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "survmix/error.hpp"
#include "survmix/special.hpp"

namespace survmix {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

PreparedData prepare(const Dataset& data) {
  validate(data);
  const auto order = canonical_order(data);
  PreparedData d;
  d.time.reserve(data.n());
  d.log_time.reserve(data.n());
  d.event.reserve(data.n());
  d.arm.reserve(data.n());
  d.orig = order;
  for (std::size_t idx : order) {
    const auto& o = data.observations[idx];
    d.time.push_back(o.time);
    d.log_time.push_back(std::log(o.time));
    d.event.push_back(o.event ? 1 : 0);
    d.arm.push_back(o.arm ? static_cast<int>(*o.arm) : -1);
    d.n_events += o.event ? 1 : 0;
  }
  return d;
}

double loglik_prepared(Family family, const double* p, const PreparedData& d) {
  double sum = 0.0;
  for (std::size_t j = 0; j < d.n(); ++j) {
    sum += d.event[j]
               ? log_pdf_raw(family, p, d.time[j], d.log_time[j])
               : log_survival_raw(family, p, d.time[j], d.log_time[j]);
  }
  return std::isfinite(sum) ? sum : -kInf;
}

double weighted_loglik_prepared(Family family, const double* p,
                                const PreparedData& d, const double* w) {
  double sum = 0.0;
  for (std::size_t j = 0; j < d.n(); ++j) {
    const double wj = w[d.orig[j]];
    if (wj == 0.0) continue;  // 0 * -inf must contribute nothing
    sum += wj * (d.event[j]
                     ? log_pdf_raw(family, p, d.time[j], d.log_time[j])
                     : log_survival_raw(family, p, d.time[j], d.log_time[j]));
  }
  return std::isfinite(sum) ? sum : -kInf;
}

double mixture_loglik_prepared(const MixtureModel& model,
                               const PreparedData& d) {
  const std::size_t m = model.size();
  double logw[8];
  const DistributionSpec* specs[8];
  if (m > 8) return -kInf;
  for (std::size_t k = 0; k < m; ++k) {
    logw[k] = std::log(model.components[k].weight);
    specs[k] = &model.components[k].spec;
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < d.n(); ++j) {
    double acc = -kInf;
    for (std::size_t k = 0; k < m; ++k) {
      const double term =
          d.event[j] ? log_pdf_raw(specs[k]->family, specs[k]->params.data(),
                                   d.time[j], d.log_time[j])
                     : log_survival_raw(specs[k]->family,
                                        specs[k]->params.data(), d.time[j],
                                        d.log_time[j]);
      acc = log_sum_exp(acc, logw[k] + term);
    }
    sum += acc;
  }
  return std::isfinite(sum) ? sum : -kInf;
}

namespace {

// Shared checked loop: evaluates per-subject terms and throws with the
// offending row if one is not finite.
template <typename Term>
double checked_sum(const PreparedData& d, const char* what, Term term) {
  double sum = 0.0;
  for (std::size_t j = 0; j < d.n(); ++j) {
    const double v = term(j);
    if (!std::isfinite(v)) {
      throw numerical_error(std::string(what) +
                            ": non-finite log-likelihood term at observation " +
                            std::to_string(d.orig[j] + 1));
    }
    sum += v;
  }
  return sum;
}

}  // namespace

double simple_loglik(const DistributionSpec& spec, const Dataset& data) {
  validate(spec);
  const PreparedData d = prepare(data);
  return checked_sum(d, "simple_loglik", [&](std::size_t j) {
    return d.event[j]
               ? log_pdf_raw(spec.family, spec.params.data(), d.time[j],
                             d.log_time[j])
               : log_survival_raw(spec.family, spec.params.data(), d.time[j],
                                  d.log_time[j]);
  });
}

double mixture_loglik(const MixtureModel& model, const Dataset& data) {
  validate(model);
  if (data.n() == 0) throw data_error("mixture_loglik: empty dataset");
  const PreparedData d = prepare(data);
  std::vector<double> logw;
  for (const auto& c : model.components) logw.push_back(std::log(c.weight));
  return checked_sum(d, "mixture_loglik", [&](std::size_t j) {
    double acc = -kInf;
    for (std::size_t k = 0; k < model.size(); ++k) {
      const auto& spec = model.components[k].spec;
      const double term =
          d.event[j] ? log_pdf_raw(spec.family, spec.params.data(), d.time[j],
                                   d.log_time[j])
                     : log_survival_raw(spec.family, spec.params.data(),
                                        d.time[j], d.log_time[j]);
      acc = log_sum_exp(acc, logw[k] + term);
    }
    return acc;
  });
}

}  // namespace survmix
