#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "survmix/data.hpp"
#include "survmix/fit.hpp"

namespace survmix {

// One plottable survival curve: (time, survival) pairs with times strictly
// increasing and survival non-increasing in [0, 1].
struct CurvePoints {
  enum class Kind { KaplanMeier, ModelCurve, ComponentCurve };
  std::string label;
  Kind kind = Kind::KaplanMeier;
  std::vector<std::pair<double, double>> points;
};

// Product-limit estimate stepped at the distinct event times; censored
// subjects stay in the risk set through their censoring time. Censoring
// after the last event leaves the curve unchanged.
// Throws degeneracy_error when the data has no events.
CurvePoints km_estimator(const Dataset& data, const std::string& label = "km");

// Evaluation grid "start:stop:step" with start >= 0 and step > 0; stop is
// included when it lands on the lattice. parse_grid throws usage_error on
// malformed text or an empty grid.
struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
};
GridSpec parse_grid(const std::string& text);
std::vector<double> grid_times(const GridSpec& grid);

// Everything needed to overlay a fit on the data: per-arm Kaplan-Meier
// curves (one pooled curve when the data has no arms), the fitted mixture
// survival on the grid, and one curve per component. Treatment fits get
// arm-specific model and component curves; pooled fits one shared set.
std::vector<CurvePoints> emit_curves(const Dataset& data, const FitResult& fit,
                                     const GridSpec& grid);

// CSV with columns series,time,survival.
void write_curves_csv(std::ostream& out, const std::vector<CurvePoints>& curves);

}  // namespace survmix
