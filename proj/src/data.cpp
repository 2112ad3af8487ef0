#include "survmix/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "survmix/error.hpp"

namespace survmix {

std::size_t Dataset::n_events() const {
  std::size_t count = 0;
  for (const auto& o : observations) count += o.event ? 1 : 0;
  return count;
}

bool Dataset::has_arms() const {
  if (observations.empty()) return false;
  return std::all_of(observations.begin(), observations.end(),
                     [](const Observation& o) { return o.arm.has_value(); });
}

void validate(const Dataset& data) {
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto& o = data.observations[i];
    if (!std::isfinite(o.time) || !(o.time > 0.0)) {
      throw data_error("observation " + std::to_string(i + 1) +
                       ": time must be finite and > 0");
    }
  }
  if (data.component_truth &&
      data.component_truth->size() != data.n()) {
    throw data_error("component truth column length does not match data");
  }
}

std::vector<std::size_t> canonical_order(const Dataset& data) {
  std::vector<std::size_t> order(data.n());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     const auto& x = data.observations[a];
                     const auto& y = data.observations[b];
                     if (x.time != y.time) return x.time < y.time;
                     if (x.event != y.event) return x.event < y.event;
                     const int xa = x.arm ? static_cast<int>(*x.arm) : -1;
                     const int ya = y.arm ? static_cast<int>(*y.arm) : -1;
                     return xa < ya;
                   });
  return order;
}

}  // namespace survmix
