#include "survmix/logrank.hpp"

#include <algorithm>
#include <cstddef>
#include <vector>

#include "survmix/error.hpp"
#include "survmix/special.hpp"

namespace survmix {

LogRankResult log_rank(const Dataset& data) {
  validate(data);
  const std::size_t n = data.n();
  std::vector<std::size_t> order;
  order.reserve(n);
  double at_risk[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    if (!data.observations[i].arm) {
      throw data_error("log_rank: observation " + std::to_string(i + 1) +
                       " has no group label");
    }
    at_risk[static_cast<int>(*data.observations[i].arm)] += 1.0;
    order.push_back(i);
  }
  if (at_risk[0] == 0.0 || at_risk[1] == 0.0) {
    throw usage_error("log_rank: both groups must be nonempty");
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return data.observations[a].time < data.observations[b].time;
  });

  LogRankResult res;
  std::size_t i = 0;
  while (i < n) {
    const double t = data.observations[order[i]].time;
    double deaths[2] = {0.0, 0.0};
    double leaving[2] = {0.0, 0.0};
    std::size_t j = i;
    for (; j < n && data.observations[order[j]].time == t; ++j) {
      const auto& o = data.observations[order[j]];
      const int g = static_cast<int>(*o.arm);
      leaving[g] += 1.0;
      if (o.event) deaths[g] += 1.0;
    }
    const double d = deaths[0] + deaths[1];
    if (d > 0.0) {
      const double nt = at_risk[0] + at_risk[1];
      const double share = at_risk[0] / nt;
      res.observed[0] += deaths[0];
      res.observed[1] += deaths[1];
      res.expected[0] += d * share;
      res.expected[1] += d * (1.0 - share);
      if (nt > 1.0) {
        res.variance +=
            d * share * (1.0 - share) * (nt - d) / (nt - 1.0);
      }
    }
    at_risk[0] -= leaving[0];
    at_risk[1] -= leaving[1];
    i = j;
  }

  if (res.observed[0] + res.observed[1] == 0.0) {
    throw degeneracy_error("log_rank: no events to compare");
  }
  if (res.variance <= 0.0) {
    // Every event time had a one-sided or exhausted risk set, which forces
    // observed = expected exactly; the comparison is vacuous, not wrong.
    res.statistic = 0.0;
    res.p_value = 1.0;
    return res;
  }
  const double diff = res.observed[0] - res.expected[0];
  res.statistic = diff * diff / res.variance;
  res.p_value = chi_square_sf(res.statistic, 1);
  return res;
}

}  // namespace survmix
