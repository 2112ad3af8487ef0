#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace survmix {

enum class Arm { Control = 0, Treated = 1 };

// One subject: follow-up time in months, whether death was observed (false =
// right-censored), and the treatment arm when the study has one.
struct Observation {
  double time = 0.0;
  bool event = false;
  std::optional<Arm> arm;
};

// A survival dataset. component_truth carries the generating component index
// per subject for simulated data (simulator output with truth enabled);
// real data never has it.
struct Dataset {
  std::vector<Observation> observations;
  std::optional<std::vector<int>> component_truth;

  std::size_t n() const { return observations.size(); }
  std::size_t n_events() const;
  std::size_t n_censored() const { return n() - n_events(); }
  // True when every observation carries an arm label.
  bool has_arms() const;
};

// Throws data_error on non-finite or non-positive times, or a truth column
// whose length does not match.
void validate(const Dataset& data);

// Permutation of observation indices sorted by (time, event, arm). Every
// reduction over observations in the fitting code walks this order, which
// makes all computed sums — and therefore every fitted value — exactly
// invariant under permutation of the input rows.
std::vector<std::size_t> canonical_order(const Dataset& data);

// Subset by predicate on index, preserving row order and the truth column.
template <typename Pred>
Dataset filter(const Dataset& data, Pred keep) {
  Dataset out;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (!keep(i)) continue;
    out.observations.push_back(data.observations[i]);
    if (data.component_truth) {
      if (!out.component_truth) out.component_truth.emplace();
      out.component_truth->push_back((*data.component_truth)[i]);
    }
  }
  return out;
}

}  // namespace survmix
