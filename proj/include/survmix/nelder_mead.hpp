#pragma once

#include <functional>
#include <vector>

namespace survmix {

struct NelderMeadOptions {
  // Converged when the simplex diameter (max distance of any vertex from the
  // best one, infinity norm) falls below tol.
  double tol = 1e-8;
  // Total objective-evaluation budget, restarts included.
  int max_evals = 2000;
  // Edge length of the initial axis-aligned simplex.
  double init_step = 0.25;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evals = 0;
  bool converged = false;
};

// Minimizes f by the Nelder-Mead simplex method. Non-finite objective values
// are treated as +inf (rejected), so f may simply return NaN/-inf-derived
// garbage for out-of-range points. After the simplex collapses the search
// restarts once from the best point with a smaller simplex; convergence is
// declared when a collapse brings no further improvement. The result is
// never worse than f(x0): the start is a vertex and the best vertex only
// improves.
NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, const NelderMeadOptions& opts = {});

}  // namespace survmix
