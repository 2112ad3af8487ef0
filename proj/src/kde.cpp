#include "survmix/kde.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "survmix/error.hpp"

namespace survmix {

namespace {

constexpr int kGridPoints = 512;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

}  // namespace

std::vector<double> kde_density(const std::vector<double>& samples, double h,
                                const std::vector<double>& grid) {
  if (samples.empty()) throw usage_error("kde_density: empty sample");
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw domain_error("kde_density: bandwidth must be positive");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] < grid[i - 1]) {
      throw usage_error("kde_density: grid must be sorted ascending");
    }
  }
  // Summing in sorted sample order keeps the result independent of how the
  // caller happened to order the data.
  std::vector<double> xs(samples);
  std::sort(xs.begin(), xs.end());

  const double inv_h = 1.0 / h;
  const double norm = kInvSqrt2Pi * inv_h / static_cast<double>(xs.size());
  std::vector<double> out(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double x = grid[g];
    double acc = 0.0;
    for (double xi : xs) {
      const double u = (x - xi) * inv_h;
      acc += std::exp(-0.5 * u * u);
    }
    out[g] = norm * acc;
  }
  return out;
}

std::vector<double> kde_grid(const std::vector<double>& samples, double h) {
  if (samples.empty()) throw usage_error("kde_grid: empty sample");
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *mn - 3.0 * h;
  const double hi = *mx + 3.0 * h;
  std::vector<double> grid(kGridPoints);
  const double step = (hi - lo) / (kGridPoints - 1);
  for (int i = 0; i < kGridPoints; ++i) grid[i] = lo + step * i;
  grid.back() = hi;
  return grid;
}

int count_modes(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 3) throw usage_error("count_modes: need at least 3 grid values");
  int modes = 0;
  std::size_t i = 0;
  while (i < n) {
    // [i, j) is a maximal run of equal values.
    std::size_t j = i + 1;
    while (j < n && values[j] == values[i]) ++j;
    const bool left_lower = i == 0 || values[i - 1] < values[i];
    const bool right_lower = j == n || values[j] < values[i];
    if (left_lower && right_lower) ++modes;
    i = j;
  }
  return modes;
}

BandwidthResult critical_bandwidth(const std::vector<double>& samples, int k,
                                   double tol) {
  if (samples.size() < 2) {
    throw usage_error("critical_bandwidth: need at least 2 samples");
  }
  if (k < 1) throw usage_error("critical_bandwidth: k must be >= 1");
  if (!(tol > 0.0)) throw domain_error("critical_bandwidth: tol must be > 0");

  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  const double range = *mx - *mn;
  if (range == 0.0) return {0.0, true};

  const auto modes_at = [&](double h) {
    return count_modes(kde_density(samples, h, kde_grid(samples, h)));
  };

  double lo = 1e-6 * range;
  double hi = range;
  // The range is always enough smoothing in practice; the doubling is a
  // safety net against grid-resolution artifacts.
  for (int guard = 0; modes_at(hi) > k; ++guard) {
    if (guard >= 60) {
      throw numerical_error("critical_bandwidth: could not smooth to k modes");
    }
    hi *= 2.0;
  }
  if (modes_at(lo) <= k) return {lo, false};  // infimum below the bracket

  // Geometric bisection: the bracket spans six decades, so halving in log
  // space converges in ~18 steps to a 1e-4 relative width.
  while (hi > lo * (1.0 + tol)) {
    const double mid = std::sqrt(lo * hi);
    if (modes_at(mid) <= k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {hi, false};
}

}  // namespace survmix
