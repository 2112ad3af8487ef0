#pragma once

#include <vector>

namespace survmix {

// Gaussian kernel density estimate evaluated at each grid point:
//   f(x) = 1/(n h) * sum_i phi((x - x_i)/h).
// The grid must be sorted ascending. Throws domain_error for h <= 0 and
// usage_error for an empty sample or unsorted grid.
std::vector<double> kde_density(const std::vector<double>& samples, double h,
                                const std::vector<double>& grid);

// Uniform 512-point grid spanning [min - 3h, max + 3h] of the sample; this
// is the evaluation grid every bandwidth-dependent routine here works on.
std::vector<double> kde_grid(const std::vector<double>& samples, double h);

// Number of modes of a function tabulated on a uniform grid. Runs of equal
// values merge into one candidate; a run counts as a mode when no adjacent
// value is >= it (so a plateau spanning the whole array counts once, and a
// run touching an endpoint needs only its inward neighbour to be lower).
// Needs at least 3 values.
int count_modes(const std::vector<double>& values);

struct BandwidthResult {
  double h = 0.0;
  bool degenerate = false;  // all samples equal; h is meaningless
};

// Smallest bandwidth at which the Gaussian KDE has at most k modes, located
// by bisection in log-bandwidth (mode count is non-increasing in h for the
// normal kernel). The bracket is [1e-6, 1] times the data range; if the lower
// end already has <= k modes it is returned as the floor. The returned h is
// the bracket's upper end, so the KDE at h is guaranteed to have <= k modes,
// within relative tolerance tol of the crossing. All-equal samples return
// h = 0 with the degenerate flag set.
BandwidthResult critical_bandwidth(const std::vector<double>& samples, int k,
                                   double tol = 1e-4);

}  // namespace survmix
