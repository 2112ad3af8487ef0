#include "survmix/silverman.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "survmix/error.hpp"
#include "survmix/kde.hpp"
#include "survmix/parallel.hpp"
#include "survmix/random.hpp"

namespace survmix {

namespace {

// Substream tag for bootstrap replicates (EM starts use tag 1).
constexpr std::uint64_t kTagBootstrap = 2;

// Rational fit for the Hall-York calibration factor lambda(alpha) of the
// k=1 Silverman test: the replicate mode count is taken at lambda * h_crit
// instead of h_crit, which undoes the raw test's conservatism.
double hall_york_lambda(double alpha) {
  const double a = alpha;
  const double num =
      ((0.94029 * a - 1.59914) * a + 0.17695) * a + 0.48971;
  const double den = ((a - 1.77793) * a + 0.36162) * a + 0.42423;
  return num / den;
}

bool replicate_exceeds(const std::vector<double>& y, double h, int k) {
  return count_modes(kde_density(y, h, kde_grid(y, h))) > k;
}

}  // namespace

SilvermanResult silverman_test(const std::vector<double>& samples, int k,
                               const SilvermanOptions& opts) {
  const std::size_t n = samples.size();
  if (n < 10) throw usage_error("silverman_test: need at least 10 samples");
  if (k < 1) throw usage_error("silverman_test: k must be >= 1");
  if (opts.n_boot < 100) {
    throw usage_error("silverman_test: need at least 100 bootstrap replicates");
  }
  for (double x : samples) {
    if (!std::isfinite(x)) {
      throw data_error("silverman_test: samples must be finite");
    }
  }
  const bool calibrate = opts.calibrate && k == 1;
  if (calibrate && !(opts.alpha > 0.0 && opts.alpha < 1.0)) {
    throw domain_error("silverman_test: alpha must lie in (0,1)");
  }

  const BandwidthResult bw = critical_bandwidth(samples, k, opts.bandwidth_tol);
  if (bw.degenerate) {
    throw degeneracy_error("silverman_test: sample has no spread");
  }
  const double h = bw.h;

  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double var = ss / static_cast<double>(n - 1);
  // Shrink factor that restores the sample variance after adding kernel
  // noise of bandwidth h to resampled points.
  const double shrink = 1.0 / std::sqrt(1.0 + h * h / var);

  const double lambda = calibrate ? hall_york_lambda(opts.alpha) : 1.0;
  const int n_boot = opts.n_boot;
  std::vector<unsigned char> exceed(n_boot, 0);
  std::vector<unsigned char> exceed_cal(calibrate ? n_boot : 0, 0);

  parallel_for(static_cast<std::size_t>(n_boot), opts.threads,
               [&](std::size_t r) {
                 RandomStream rng(opts.seed, kTagBootstrap, r);
                 std::vector<double> y(n);
                 for (std::size_t i = 0; i < n; ++i) {
                   const double pick = samples[rng.index(n)];
                   const double eps = rng.normal();
                   y[i] = mean + shrink * (pick - mean + h * eps);
                 }
                 exceed[r] = replicate_exceeds(y, h, k) ? 1 : 0;
                 if (calibrate) {
                   exceed_cal[r] = replicate_exceeds(y, lambda * h, k) ? 1 : 0;
                 }
               });

  SilvermanResult res;
  res.k = k;
  res.h_crit = h;
  res.n_boot = n_boot;
  res.n_exceed = static_cast<int>(
      std::count(exceed.begin(), exceed.end(), 1));
  res.p_value = (1.0 + res.n_exceed) / (n_boot + 1.0);
  res.seed = opts.seed;
  if (calibrate) {
    res.calibrated = true;
    res.lambda = lambda;
    res.n_exceed_calibrated = static_cast<int>(
        std::count(exceed_cal.begin(), exceed_cal.end(), 1));
    res.p_calibrated = (1.0 + *res.n_exceed_calibrated) / (n_boot + 1.0);
  }
  return res;
}

ModalityScanResult modality_scan(const std::vector<double>& samples, int k_max,
                                 const SilvermanOptions& opts) {
  if (k_max < 1) throw usage_error("modality_scan: k_max must be >= 1");
  if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) {
    throw domain_error("modality_scan: alpha must lie in (0,1)");
  }
  ModalityScanResult scan;
  for (int k = 1; k <= k_max; ++k) {
    scan.tests.push_back(silverman_test(samples, k, opts));
    const SilvermanResult& t = scan.tests.back();
    const double p = t.p_calibrated ? *t.p_calibrated : t.p_value;
    if (!scan.first_nonsignificant && p > opts.alpha) {
      scan.first_nonsignificant = k;
    }
  }
  return scan;
}

}  // namespace survmix
