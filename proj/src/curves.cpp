#include "survmix/curves.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "survmix/csv.hpp"
#include "survmix/error.hpp"

namespace survmix {

CurvePoints km_estimator(const Dataset& data, const std::string& label) {
  validate(data);
  if (data.n_events() == 0)
    throw degeneracy_error("km_estimator: no events in the data");

  std::vector<std::size_t> order(data.n());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return data.observations[a].time < data.observations[b].time;
  });

  CurvePoints curve;
  curve.label = label;
  curve.kind = CurvePoints::Kind::KaplanMeier;

  double s = 1.0;
  std::size_t at_risk = data.n();
  std::size_t i = 0;
  while (i < order.size()) {
    const double t = data.observations[order[i]].time;
    std::size_t deaths = 0;
    std::size_t leaving = 0;
    for (; i < order.size() && data.observations[order[i]].time == t; ++i) {
      ++leaving;
      if (data.observations[order[i]].event) ++deaths;
    }
    if (deaths > 0) {
      s *= 1.0 - static_cast<double>(deaths) / static_cast<double>(at_risk);
      curve.points.emplace_back(t, s);
    }
    at_risk -= leaving;
  }
  return curve;
}

GridSpec parse_grid(const std::string& text) {
  // start:stop:step, three plain decimals.
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  if (parts.size() != 3)
    throw usage_error("grid must be start:stop:step, got '" + text + "'");

  GridSpec grid;
  double* slots[3] = {&grid.start, &grid.stop, &grid.step};
  for (int i = 0; i < 3; ++i) {
    std::size_t pos = 0;
    try {
      *slots[i] = std::stod(parts[i], &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != parts[i].size() || !std::isfinite(*slots[i]))
      throw usage_error("grid field '" + parts[i] + "' is not a number");
  }
  if (grid.start < 0.0) throw usage_error("grid start must be >= 0");
  if (grid.step <= 0.0) throw usage_error("grid step must be positive");
  if (grid.stop < grid.start) throw usage_error("grid is empty (stop < start)");
  return grid;
}

std::vector<double> grid_times(const GridSpec& grid) {
  // Count lattice points up front so accumulated rounding cannot drop or
  // duplicate the endpoint.
  const double span = (grid.stop - grid.start) / grid.step;
  const std::size_t count = static_cast<std::size_t>(span * (1.0 + 1e-12) + 1e-9);
  std::vector<double> times(count + 1);
  for (std::size_t i = 0; i <= count; ++i)
    times[i] = grid.start + static_cast<double>(i) * grid.step;
  return times;
}

namespace {

CurvePoints model_curve(const MixtureModel& model, const std::vector<double>& times,
                        const std::string& label) {
  CurvePoints curve;
  curve.label = label;
  curve.kind = CurvePoints::Kind::ModelCurve;
  curve.points.reserve(times.size());
  for (double t : times) curve.points.emplace_back(t, mix_survival(model, t));
  return curve;
}

CurvePoints component_curve(const DistributionSpec& spec,
                            const std::vector<double>& times,
                            const std::string& label) {
  CurvePoints curve;
  curve.label = label;
  curve.kind = CurvePoints::Kind::ComponentCurve;
  curve.points.reserve(times.size());
  for (double t : times) curve.points.emplace_back(t, survival(spec, t));
  return curve;
}

void append_model_set(std::vector<CurvePoints>& out, const MixtureModel& model,
                      const std::vector<double>& times, const std::string& suffix) {
  out.push_back(model_curve(model, times, "model" + suffix));
  for (std::size_t k = 0; k < model.size(); ++k)
    out.push_back(component_curve(model.components[k].spec, times,
                                  "component" + std::to_string(k + 1) + suffix));
}

}  // namespace

std::vector<CurvePoints> emit_curves(const Dataset& data, const FitResult& fit,
                                     const GridSpec& grid) {
  validate(data);
  const std::vector<double> times = grid_times(grid);
  std::vector<CurvePoints> out;

  if (data.has_arms()) {
    const Arm arms[2] = {Arm::Control, Arm::Treated};
    const char* names[2] = {"_control", "_treated"};
    for (int a = 0; a < 2; ++a) {
      Dataset sub = filter(data, [&](std::size_t i) {
        return data.observations[i].arm == arms[a];
      });
      if (sub.n() > 0) out.push_back(km_estimator(sub, std::string("km") + names[a]));
    }
    if (fit.treatment) {
      for (int a = 0; a < 2; ++a)
        append_model_set(out, arm_model(*fit.treatment, arms[a]), times, names[a]);
      return out;
    }
  } else {
    out.push_back(km_estimator(data, "km"));
  }
  append_model_set(out, fit.model, times, "");
  return out;
}

void write_curves_csv(std::ostream& out, const std::vector<CurvePoints>& curves) {
  out << "series,time,survival\n";
  for (const CurvePoints& c : curves)
    for (const auto& [t, s] : c.points)
      out << c.label << ',' << format_number(t) << ',' << format_number(s) << "\n";
}

}  // namespace survmix
