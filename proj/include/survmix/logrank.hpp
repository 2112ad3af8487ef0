#pragma once

#include "survmix/data.hpp"

namespace survmix {

// Two-group comparison of event-time distributions; group = treatment arm.
struct LogRankResult {
  double observed[2] = {0.0, 0.0};  // event counts, control then treated
  double expected[2] = {0.0, 0.0};  // expected under no group difference
  double variance = 0.0;            // summed hypergeometric variance
  double statistic = 0.0;
  int df = 1;
  double p_value = 1.0;
};

// Log-rank test across the arms of `data`. At every distinct event time the
// observed control-arm deaths are compared with the expectation given the
// risk sets, with the usual hypergeometric variance for ties (zero when only
// one subject remains at risk). Subjects censored at an event time still
// count as at risk there.
// Errors: any row without an arm label -> data_error; an empty arm ->
// usage_error; zero total variance (e.g. no events) -> degeneracy_error.
LogRankResult log_rank(const Dataset& data);

}  // namespace survmix
