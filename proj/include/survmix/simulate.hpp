#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "survmix/data.hpp"
#include "survmix/mixture.hpp"
#include "survmix/random.hpp"

namespace survmix {

// How follow-up ends for simulated subjects. The random mechanisms draw an
// independent censoring time per subject; an administrative cutoff (the
// calendar end of the trial) can sit on top of either and is always applied
// last, truncating everything at the cutoff as censored.
struct CensoringSpec {
  enum class Kind {
    None,
    Administrative,
    IndependentExponential,
    IndependentUniform
  };
  Kind kind = Kind::None;
  // Cutoff time, exponential rate, or uniform maximum, depending on kind.
  double parameter = 0.0;
  // Administrative cutoff composed after a random mechanism; ignored when
  // kind is already Administrative (its own parameter is the cutoff).
  std::optional<double> admin_cutoff;
};

CensoringSpec no_censoring();
CensoringSpec administrative(double cutoff);
CensoringSpec independent_exponential(double rate);
CensoringSpec independent_uniform(double max);

// parameter_error on a non-positive parameter or cutoff.
void validate(const CensoringSpec& censoring);

// One arm: per subject, draw the component by weight, the event time from
// that component, and the censoring time per `censoring`; record
// min(event, censoring) with the event flag. Any time reaching an
// administrative cutoff is recorded as censored at the cutoff, ties
// included. The generating component (1-based) is kept in the dataset's
// truth column. Consumes the stream in subject order, so results are
// deterministic given the stream state.
Dataset simulate_arm(const MixtureModel& model, std::size_t n,
                     const CensoringSpec& censoring, RandomStream& rng);

struct TrialSpec {
  MixtureModel control_model;
  MixtureModel treated_model;
  std::size_t n_control = 0;
  std::size_t n_treated = 0;
  CensoringSpec censoring;
  std::uint64_t seed = 0;
};

// An arm model is only validated when its count is positive (a zero-count
// arm may be left empty); throws the model/censoring validation errors.
void validate(const TrialSpec& spec);

// Both arms concatenated (control rows first) with arm labels and truth
// columns. Each arm draws from its own substream of the seed, so changing
// one arm's size never changes the other arm's subjects.
Dataset simulate_trial(const TrialSpec& spec);

}  // namespace survmix
