#pragma once

#include <vector>

#include "survmix/distribution.hpp"

namespace survmix {

struct MixtureComponent {
  double weight = 1.0;
  DistributionSpec spec;
};

// Weighted mixture of parametric components. Weights are strictly positive
// and sum to 1; a zero-weight component must be dropped, not stored. A
// single-component model is just the plain distribution. The canonical form
// orders components by ascending median, so component 1 is always the
// short-survival subpopulation.
struct MixtureModel {
  std::vector<MixtureComponent> components;

  std::size_t size() const { return components.size(); }
};

MixtureModel make_mixture(std::vector<MixtureComponent> components);

// Throws parameter_error unless every weight is in (0,1], the weights sum to
// 1 within 1e-12, every component spec is valid, and there is at least one
// component.
void validate(const MixtureModel& model);

// Components sorted ascending by median; equal medians break ties by smaller
// weight first. Idempotent.
MixtureModel canonicalize(MixtureModel model);

// Mixture density sum(pi_k f_k) and survival sum(pi_k S_k), plus log forms
// computed with log-sum-exp so deep tails stay finite.
double mix_pdf(const MixtureModel& model, double t);
double mix_survival(const MixtureModel& model, double t);
double mix_log_pdf(const MixtureModel& model, double t);
double mix_log_survival(const MixtureModel& model, double t);

// One draw: pick a component by weight, then sample it. Consumes exactly two
// uniforms. component_out, when non-null, receives the 0-based component
// index actually drawn.
double mix_sample_one(const MixtureModel& model, RandomStream& rng,
                      int* component_out = nullptr);

}  // namespace survmix
