#include "survmix/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace survmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Vertex {
  std::vector<double> x;
  double value;
};

double guarded(const std::function<double(const std::vector<double>&)>& f,
               const std::vector<double>& x, int& evals) {
  ++evals;
  const double v = f(x);
  return std::isfinite(v) ? v : kInf;
}

double diameter(const std::vector<Vertex>& s) {
  double d = 0.0;
  for (std::size_t v = 1; v < s.size(); ++v) {
    for (std::size_t i = 0; i < s[0].x.size(); ++i) {
      d = std::max(d, std::fabs(s[v].x[i] - s[0].x[i]));
    }
  }
  return d;
}

}  // namespace

NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, const NelderMeadOptions& opts) {
  const std::size_t n = x0.size();
  NelderMeadResult result;
  result.x = x0;
  int evals = 0;
  result.value = guarded(f, x0, evals);

  double step = opts.init_step;
  bool converged = false;
  while (evals < opts.max_evals && !converged) {
    // Build an axis-aligned simplex around the best point so far.
    std::vector<Vertex> s;
    s.reserve(n + 1);
    s.push_back({result.x, result.value});
    for (std::size_t i = 0; i < n; ++i) {
      Vertex v{result.x, 0.0};
      v.x[i] += step;
      v.value = guarded(f, v.x, evals);
      s.push_back(std::move(v));
    }
    const double pass_start_value = result.value;

    while (evals < opts.max_evals) {
      std::stable_sort(s.begin(), s.end(),
                       [](const Vertex& a, const Vertex& b) {
                         return a.value < b.value;
                       });
      if (diameter(s) < opts.tol) break;

      // Centroid of all but the worst vertex.
      std::vector<double> c(n, 0.0);
      for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t i = 0; i < n; ++i) c[i] += s[v].x[i];
      }
      for (double& ci : c) ci /= static_cast<double>(n);
      const Vertex& worst = s[n];

      auto at = [&](double coef) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) {
          x[i] = c[i] + coef * (c[i] - worst.x[i]);
        }
        return x;
      };

      std::vector<double> xr = at(1.0);
      const double fr = guarded(f, xr, evals);
      if (fr < s[0].value) {
        std::vector<double> xe = at(2.0);
        const double fe = guarded(f, xe, evals);
        if (fe < fr) {
          s[n] = {std::move(xe), fe};
        } else {
          s[n] = {std::move(xr), fr};
        }
      } else if (fr < s[n - 1].value) {
        s[n] = {std::move(xr), fr};
      } else {
        const bool outside = fr < worst.value;
        std::vector<double> xc = at(outside ? 0.5 : -0.5);
        const double fc = guarded(f, xc, evals);
        if (fc < (outside ? fr : worst.value)) {
          s[n] = {std::move(xc), fc};
        } else {
          // Shrink every non-best vertex toward the best one.
          for (std::size_t v = 1; v <= n; ++v) {
            for (std::size_t i = 0; i < n; ++i) {
              s[v].x[i] = 0.5 * (s[v].x[i] + s[0].x[i]);
            }
            s[v].value = guarded(f, s[v].x, evals);
          }
        }
      }
    }

    std::stable_sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) {
      return a.value < b.value;
    });
    if (s[0].value < result.value) {
      result.x = s[0].x;
      result.value = s[0].value;
    }
    if (diameter(s) >= opts.tol) break;  // budget ran out mid-pass

    // The simplex collapsed. If the pass made real progress, restart with a
    // tighter simplex around the new best point; otherwise we are done.
    const double gain = pass_start_value - result.value;
    if (gain <= 1e-10 * (1.0 + std::fabs(result.value))) {
      converged = true;
    } else {
      step = std::max(0.1 * step, 100.0 * opts.tol);
    }
  }

  result.evals = evals;
  result.converged = converged;
  return result;
}

}  // namespace survmix
