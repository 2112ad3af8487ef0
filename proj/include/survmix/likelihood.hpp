#pragma once

#include <cstddef>
#include <vector>

#include "survmix/data.hpp"
#include "survmix/mixture.hpp"

namespace survmix {

// Dataset flattened into parallel arrays in canonical (time, event, arm)
// order, with log(t) precomputed. Every likelihood reduction walks these
// arrays front to back, so sums do not depend on the input row order and
// fitted values are exactly reproducible under row permutation.
struct PreparedData {
  std::vector<double> time;
  std::vector<double> log_time;
  std::vector<unsigned char> event;
  std::vector<int> arm;           // -1 when the observation has no arm label
  std::vector<std::size_t> orig;  // orig[j] = row index in the source Dataset
  std::size_t n_events = 0;

  std::size_t n() const { return time.size(); }
};

PreparedData prepare(const Dataset& data);

// Censored log-likelihood of a single distribution: log f for events,
// log S for censored subjects. Throws numerical_error naming the first
// observation whose term is not finite.
double simple_loglik(const DistributionSpec& spec, const Dataset& data);

// Censored mixture log-likelihood, log-sum-exp stabilized per subject.
double mixture_loglik(const MixtureModel& model, const Dataset& data);

// Optimizer-facing fast paths. No validation, no throwing: a non-finite sum
// comes back as -inf and the caller treats it as a rejected point. Weights
// are indexed by the original dataset row (w[orig[j]]).
double loglik_prepared(Family family, const double* p,
                       const PreparedData& d);
double weighted_loglik_prepared(Family family, const double* p,
                                const PreparedData& d, const double* w);
double mixture_loglik_prepared(const MixtureModel& model,
                               const PreparedData& d);

}  // namespace survmix
