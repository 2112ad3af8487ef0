#include "survmix/cutpoint.hpp"

#include <algorithm>
#include <cmath>

#include "survmix/distribution.hpp"
#include "survmix/error.hpp"

namespace survmix {

double cut_point(const MixtureModel& model, bool weighted) {
  validate(model);
  if (model.size() != 2) {
    throw usage_error("cut_point: model must have exactly two components");
  }
  const auto& c1 = model.components[0];
  const auto& c2 = model.components[1];
  if (c1.spec.family == c2.spec.family && c1.spec.params == c2.spec.params) {
    throw no_unique_cut_point("cut_point: components are identical");
  }
  const double lw1 = weighted ? std::log(c1.weight) : 0.0;
  const double lw2 = weighted ? std::log(c2.weight) : 0.0;
  // Comparing on the log scale keeps the sign robust far out in the tails.
  const auto diff = [&](double t) {
    const double lt = std::log(t);
    return (lw1 + log_pdf_raw(c1.spec.family, c1.spec.params.data(), t, lt)) -
           (lw2 + log_pdf_raw(c2.spec.family, c2.spec.params.data(), t, lt));
  };

  double a = median(c1.spec);
  double b = median(c2.spec);
  if (a > b) std::swap(a, b);
  double fa = diff(a);
  double fb = diff(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw no_unique_cut_point(
        "cut_point: densities do not cross between the component medians");
  }
  for (int it = 0; it < 200 && b - a > 1e-14 * b; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = diff(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  return 0.5 * (a + b);
}

ClassificationResult classify(const Dataset& data, const MixtureModel& model,
                              bool weighted) {
  validate(data);
  if (data.n() == 0) throw usage_error("classify: empty dataset");
  ClassificationResult res;
  res.cut_point = cut_point(model, weighted);
  res.labels.reserve(data.n());
  std::size_t short_count = 0;
  for (const auto& o : data.observations) {
    const bool is_short = o.time < res.cut_point;
    res.labels.push_back(is_short ? Subpop::Short : Subpop::Long);
    if (is_short) ++short_count;
  }
  res.short_fraction =
      static_cast<double>(short_count) / static_cast<double>(data.n());
  return res;
}

SubpopComparison subpop_treatment_comparison(const Dataset& data,
                                             const FitResult& fit) {
  validate(data);
  if (!data.has_arms()) {
    throw data_error(
        "subpop comparison: every subject needs a treatment-arm label");
  }
  bool present[2] = {false, false};
  for (const auto& o : data.observations) {
    present[static_cast<int>(*o.arm)] = true;
  }
  if (!present[0] || !present[1]) {
    throw usage_error("subpop comparison: both arms must be present");
  }

  MixtureModel arm_mix[2];
  if (fit.treatment) {
    arm_mix[0] = arm_model(*fit.treatment, Arm::Control);
    arm_mix[1] = arm_model(*fit.treatment, Arm::Treated);
  } else {
    if (fit.model.size() != 2) {
      throw usage_error("subpop comparison: fit must have two components");
    }
    arm_mix[0] = fit.model;
    arm_mix[1] = fit.model;
  }

  SubpopComparison out;
  out.cut_points[0] = cut_point(arm_mix[0]);
  out.cut_points[1] = cut_point(arm_mix[1]);
  out.labels.reserve(data.n());
  for (const auto& o : data.observations) {
    const double cut = out.cut_points[static_cast<int>(*o.arm)];
    out.labels.push_back(o.time < cut ? Subpop::Short : Subpop::Long);
  }

  const auto run_stratum = [&](Subpop stratum, const char* name)
      -> std::optional<LogRankResult> {
    const Dataset sub = filter(
        data, [&](std::size_t i) { return out.labels[i] == stratum; });
    bool have[2] = {false, false};
    for (const auto& o : sub.observations) {
      have[static_cast<int>(*o.arm)] = true;
    }
    if (!have[0] || !have[1]) {
      out.warnings.push_back(std::string(name) +
                             " stratum skipped: an arm has no subjects there");
      return std::nullopt;
    }
    try {
      return log_rank(sub);
    } catch (const degeneracy_error& e) {
      out.warnings.push_back(std::string(name) +
                             " stratum skipped: " + e.what());
      return std::nullopt;
    }
  };
  out.short_test = run_stratum(Subpop::Short, "short");
  out.long_test = run_stratum(Subpop::Long, "long");
  return out;
}

}  // namespace survmix
