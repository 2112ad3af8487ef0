#include "survmix/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "survmix/error.hpp"
#include "survmix/special.hpp"

namespace survmix {

MixtureModel make_mixture(std::vector<MixtureComponent> components) {
  MixtureModel model{std::move(components)};
  validate(model);
  return model;
}

void validate(const MixtureModel& model) {
  if (model.components.empty()) {
    throw parameter_error("mixture must have at least one component");
  }
  double total = 0.0;
  for (const auto& c : model.components) {
    if (!(c.weight > 0.0 && c.weight <= 1.0)) {
      throw parameter_error("mixture weights must lie in (0,1]");
    }
    validate(c.spec);
    total += c.weight;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    throw parameter_error("mixture weights must sum to 1");
  }
}

MixtureModel canonicalize(MixtureModel model) {
  validate(model);
  std::stable_sort(model.components.begin(), model.components.end(),
                   [](const MixtureComponent& a, const MixtureComponent& b) {
                     const double ma = median(a.spec);
                     const double mb = median(b.spec);
                     if (ma != mb) return ma < mb;
                     return a.weight < b.weight;
                   });
  return model;
}

double mix_log_pdf(const MixtureModel& model, double t) {
  validate(model);
  if (!(t > 0.0)) throw domain_error("mix_pdf: t must be > 0");
  const double log_t = std::log(t);
  double acc = -std::numeric_limits<double>::infinity();
  for (const auto& c : model.components) {
    acc = log_sum_exp(acc, std::log(c.weight) +
                               log_pdf_raw(c.spec.family, c.spec.params.data(),
                                           t, log_t));
  }
  return acc;
}

double mix_pdf(const MixtureModel& model, double t) {
  return std::exp(mix_log_pdf(model, t));
}

double mix_log_survival(const MixtureModel& model, double t) {
  validate(model);
  if (!(t >= 0.0)) throw domain_error("mix_survival: t must be >= 0");
  if (t == 0.0) return 0.0;
  const double log_t = std::log(t);
  double acc = -std::numeric_limits<double>::infinity();
  for (const auto& c : model.components) {
    acc = log_sum_exp(acc, std::log(c.weight) +
                               log_survival_raw(c.spec.family,
                                                c.spec.params.data(), t,
                                                log_t));
  }
  return acc;
}

double mix_survival(const MixtureModel& model, double t) {
  return std::exp(mix_log_survival(model, t));
}

double mix_sample_one(const MixtureModel& model, RandomStream& rng,
                      int* component_out) {
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t pick = model.components.size() - 1;
  for (std::size_t k = 0; k < model.components.size(); ++k) {
    acc += model.components[k].weight;
    if (u < acc) {
      pick = k;
      break;
    }
  }
  if (component_out) *component_out = static_cast<int>(pick);
  return sample_one(model.components[pick].spec, rng);
}

}  // namespace survmix
