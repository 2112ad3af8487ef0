#pragma once

#include <optional>
#include <string>
#include <vector>

#include "survmix/data.hpp"
#include "survmix/fit.hpp"
#include "survmix/logrank.hpp"
#include "survmix/mixture.hpp"

namespace survmix {

// Where the two component populations separate: the time at which the
// weight-scaled component densities pi_1 f_1 and pi_2 f_2 cross, found by
// bisection between the component medians. At that point the posterior
// probability of either component is exactly one half. With weighted=false
// the raw densities f_1 = f_2 are intersected instead.
// Throws no_unique_cut_point when the components are identical or the
// scaled densities do not change sign between the medians; usage_error
// unless the model has exactly two components.
double cut_point(const MixtureModel& model, bool weighted = true);

enum class Subpop { Short, Long };

struct ClassificationResult {
  double cut_point = 0.0;
  std::vector<Subpop> labels;  // aligned with input rows
  double short_fraction = 0.0;
};

// Thresholds every subject's observed time at the model's cut point. Times
// below it are short-term; a time exactly at the cut point counts as long.
ClassificationResult classify(const Dataset& data, const MixtureModel& model,
                              bool weighted = true);

struct SubpopComparison {
  // Cut point seen by each arm (identical when the fit has no treatment
  // structure), indexed by Arm.
  double cut_points[2] = {0.0, 0.0};
  std::vector<Subpop> labels;
  // Per-stratum arm comparisons; missing when the stratum was skipped (an
  // arm absent there, or no informative events), with the reason recorded.
  std::optional<LogRankResult> short_test;
  std::optional<LogRankResult> long_test;
  std::vector<std::string> warnings;
};

// Splits subjects into short/long-term subpopulations under the fitted
// two-component model — each subject classified against its own arm's
// mixture when the fit carries treatment structure — then compares the arms
// within each stratum by log-rank. Data must be fully arm-labeled with both
// arms present.
SubpopComparison subpop_treatment_comparison(const Dataset& data,
                                             const FitResult& fit);

}  // namespace survmix
