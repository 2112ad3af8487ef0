#include "survmix/simulate.hpp"

#include <algorithm>
#include <limits>

#include "survmix/error.hpp"

namespace survmix {

namespace {

// Substream tag for trial arms (EM starts use 1, bootstrap replicates 2).
constexpr std::uint64_t kTagSimulate = 3;

}  // namespace

void validate(const CensoringSpec& censoring) {
  if (censoring.kind != CensoringSpec::Kind::None &&
      !(censoring.parameter > 0.0 &&
        std::isfinite(censoring.parameter))) {
    throw parameter_error("censoring parameter must be positive and finite");
  }
  if (censoring.admin_cutoff &&
      !(*censoring.admin_cutoff > 0.0 &&
        std::isfinite(*censoring.admin_cutoff))) {
    throw parameter_error("administrative cutoff must be positive and finite");
  }
}

CensoringSpec no_censoring() { return {}; }

CensoringSpec administrative(double cutoff) {
  CensoringSpec c;
  c.kind = CensoringSpec::Kind::Administrative;
  c.parameter = cutoff;
  validate(c);
  return c;
}

CensoringSpec independent_exponential(double rate) {
  CensoringSpec c;
  c.kind = CensoringSpec::Kind::IndependentExponential;
  c.parameter = rate;
  validate(c);
  return c;
}

CensoringSpec independent_uniform(double max) {
  CensoringSpec c;
  c.kind = CensoringSpec::Kind::IndependentUniform;
  c.parameter = max;
  validate(c);
  return c;
}

Dataset simulate_arm(const MixtureModel& model, std::size_t n,
                     const CensoringSpec& censoring, RandomStream& rng) {
  validate(censoring);
  Dataset out;
  if (n == 0) return out;
  validate(model);
  out.observations.reserve(n);
  out.component_truth.emplace();
  out.component_truth->reserve(n);

  constexpr double kNever = std::numeric_limits<double>::infinity();
  double admin = kNever;
  if (censoring.kind == CensoringSpec::Kind::Administrative) {
    admin = censoring.parameter;
  } else if (censoring.admin_cutoff) {
    admin = *censoring.admin_cutoff;
  }

  for (std::size_t i = 0; i < n; ++i) {
    int comp = 0;
    const double t = mix_sample_one(model, rng, &comp);
    double c = kNever;
    switch (censoring.kind) {
      case CensoringSpec::Kind::IndependentExponential:
        c = rng.exponential(censoring.parameter);
        break;
      case CensoringSpec::Kind::IndependentUniform:
        c = rng.uniform(0.0, censoring.parameter);
        break;
      default:
        break;
    }
    Observation o;
    o.time = std::min(t, c);
    o.event = t <= c;
    if (o.time >= admin) {
      o.time = admin;
      o.event = false;
    }
    out.observations.push_back(o);
    out.component_truth->push_back(comp + 1);
  }
  return out;
}

void validate(const TrialSpec& spec) {
  validate(spec.censoring);
  if (spec.n_control > 0) validate(spec.control_model);
  if (spec.n_treated > 0) validate(spec.treated_model);
}

Dataset simulate_trial(const TrialSpec& spec) {
  validate(spec);
  Dataset out;
  const MixtureModel* models[2] = {&spec.control_model, &spec.treated_model};
  const std::size_t counts[2] = {spec.n_control, spec.n_treated};
  for (int arm = 0; arm < 2; ++arm) {
    RandomStream rng(spec.seed, kTagSimulate, static_cast<std::uint64_t>(arm));
    Dataset part = simulate_arm(*models[arm], counts[arm], spec.censoring, rng);
    for (auto& o : part.observations) o.arm = static_cast<Arm>(arm);
    out.observations.insert(out.observations.end(),
                            part.observations.begin(),
                            part.observations.end());
    if (part.component_truth) {
      if (!out.component_truth) out.component_truth.emplace();
      out.component_truth->insert(out.component_truth->end(),
                                  part.component_truth->begin(),
                                  part.component_truth->end());
    }
  }
  return out;
}

}  // namespace survmix
