#pragma once

// Shared internals of the fitting code (simple, EM, treatment variants):
// the optimizer parameter transforms and the responsibility-weighted
// component fit. Not part of the public headers.

#include <vector>

#include "survmix/distribution.hpp"
#include "survmix/likelihood.hpp"

namespace survmix {
namespace detail {

// All positive parameters are optimized on the log scale. A log coordinate
// beyond +-30 (or a lognormal mu beyond +-300) means the likelihood pushed a
// parameter to a boundary — e.g. sigma -> 0 when every event shares one
// time — and the fit is reported as degenerate rather than returned.
constexpr double kLogCoordBound = 30.0;
constexpr double kLocCoordBound = 300.0;
// Objective hard wall: beyond this the objective returns +inf so the
// simplex cannot run off to overflow territory.
constexpr double kCoordWall = 50.0;

int coord_count(Family family);

// Optimizer coordinates <-> natural parameters. Exponential {log rate};
// Weibull/log-logistic {log shape, log rate}; lognormal {mu, log sigma}.
void coords_to_params(Family family, const std::vector<double>& x, double* p);
std::vector<double> params_to_coords(Family family, const double* p);
bool coords_out_of_bounds(Family family, const std::vector<double>& x);

double clamp_weight(double p, double floor);

struct ComponentFit {
  DistributionSpec spec;
  double loglik = 0.0;
  int evals = 0;
  bool converged = false;
  int start_index = 0;
};

// Maximizes the (optionally weighted) censored log-likelihood of one family.
// w is indexed by original dataset row, or null for unweighted. warm, when
// given, is used as an extra start — the result is then never worse than the
// warm point, which is what makes the EM update monotone. thorough tries
// every cold-start candidate instead of just the best-scoring one.
// Throws degeneracy_error when the winner sits outside the coordinate
// bounds.
ComponentFit fit_component(Family family, const PreparedData& d,
                           const double* w, const DistributionSpec* warm,
                           bool thorough);

// Responsibilities for a two-component model, written into z (original row
// indexing). Throws numerical_error naming the first observation where both
// components vanish.
void e_step_prepared(const MixtureModel& model, const PreparedData& d,
                     std::vector<double>& z);

}  // namespace detail
}  // namespace survmix
