#include "survmix/model_select.hpp"

#include <algorithm>

#include "survmix/error.hpp"
#include "survmix/special.hpp"

namespace survmix {

namespace {

bool nested(Variant full, Variant reduced) {
  switch (full) {
    case Variant::V2:
    case Variant::V3:
      return reduced == Variant::V1;
    case Variant::V4:
      return reduced == Variant::V1 || reduced == Variant::V2 ||
             reduced == Variant::V3;
    default:
      return false;
  }
}

}  // namespace

double aic(double loglik, int n_params) {
  if (n_params < 0) throw usage_error("aic: negative parameter count");
  return -2.0 * loglik + 2.0 * n_params;
}

std::vector<std::size_t> rank_models(const std::vector<FitResult>& fits) {
  if (fits.empty()) throw usage_error("rank_models: no fits given");
  std::vector<std::size_t> idx(fits.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (fits[a].aic != fits[b].aic) {
                       return fits[a].aic < fits[b].aic;
                     }
                     return fits[a].n_params < fits[b].n_params;
                   });
  return idx;
}

LrtResult lr_test(const FitResult& full, const FitResult& reduced) {
  if (!nested(full.variant, reduced.variant)) {
    throw usage_error("lr_test: model variants are not nested");
  }
  if (reduced.n_params >= full.n_params) {
    throw usage_error(
        "lr_test: reduced model must have fewer parameters than the full one");
  }
  const double delta = full.loglik - reduced.loglik;
  if (delta < -1e-6) {
    throw fit_error(
        "lr_test: reduced model fits better than the full one; an optimizer "
        "failed to converge");
  }
  LrtResult r;
  r.statistic = std::max(0.0, 2.0 * delta);
  r.df = full.n_params - reduced.n_params;
  r.p_value = chi_square_sf(r.statistic, r.df);
  return r;
}

}  // namespace survmix
