#pragma once

#include <cstddef>
#include <vector>

#include "survmix/fit.hpp"

namespace survmix {

// Akaike information criterion, -2*loglik + 2*n_params. n_params must be
// non-negative (usage_error).
double aic(double loglik, int n_params);

// Order of the given fits from best to worst: ascending AIC, ties broken by
// fewer parameters, then by position in the input. Returns indices into
// `fits`; needs at least one.
std::vector<std::size_t> rank_models(const std::vector<FitResult>& fits);

struct LrtResult {
  double statistic = 0.0;  // 2 * (loglik_full - loglik_reduced), floored at 0
  int df = 1;              // parameter-count difference
  double p_value = 1.0;
};

// Likelihood-ratio test of a reduced model variant inside a fuller one.
// Legal pairings follow the variant nesting: 1 inside 2, 3, or 4; 2 or 3
// inside 4. Anything else — the single-distribution variant included — is a
// usage_error. A reduced log-likelihood above the full one by more than 1e-6
// means an optimizer failed and raises fit_error; smaller excesses clamp the
// statistic to zero.
LrtResult lr_test(const FitResult& full, const FitResult& reduced);

}  // namespace survmix
