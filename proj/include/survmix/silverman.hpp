#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace survmix {

struct SilvermanOptions {
  int n_boot = 500;
  std::uint64_t seed = 0;
  // Hall-York recalibration of the k=1 test at level alpha; the raw
  // bootstrap p is always reported, the calibrated one alongside it.
  bool calibrate = false;
  double alpha = 0.05;  // significance level: the scan threshold, and the
                        // level the calibration is tuned to
  int threads = 1;
  double bandwidth_tol = 1e-4;
};

struct SilvermanResult {
  int k = 1;               // null hypothesis: at most k modes
  double h_crit = 0.0;     // critical bandwidth of the observed sample
  int n_boot = 0;
  int n_exceed = 0;        // replicates whose KDE at h_crit had > k modes
  double p_value = 1.0;    // (1 + n_exceed) / (n_boot + 1)
  bool calibrated = false;
  // Present when calibrated: the Hall-York bandwidth multiplier and the
  // exceedance count / p-value recomputed at lambda * h_crit.
  std::optional<double> lambda;
  std::optional<int> n_exceed_calibrated;
  std::optional<double> p_calibrated;
  std::uint64_t seed = 0;
};

// Silverman's smoothed-bootstrap test of H0 "at most k modes" against more.
// Each replicate resamples the data, perturbs it with kernel noise at the
// critical bandwidth, rescales to preserve the sample variance, and checks
// whether its own density estimate at that bandwidth develops extra modes.
// Deterministic given (samples, k, n_boot, seed) regardless of thread count.
// Calibration applies to k = 1 only and is ignored otherwise. Throws
// usage_error on precondition violations (n >= 10, n_boot >= 100, k >= 1)
// and degeneracy_error when the sample has no spread.
SilvermanResult silverman_test(const std::vector<double>& samples, int k,
                               const SilvermanOptions& opts = {});

struct ModalityScanResult {
  std::vector<SilvermanResult> tests;  // k = 1 .. k_max, in order
  // Smallest k whose test is not significant at opts.alpha (calibrated p
  // when calibration is active for that k, raw p otherwise); empty when
  // every k up to k_max rejects.
  std::optional<int> first_nonsignificant;
};

// Runs silverman_test for k = 1..k_max and reports where the p-value first
// clears alpha. Requires 0 < alpha < 1 (domain_error otherwise).
ModalityScanResult modality_scan(const std::vector<double>& samples, int k_max,
                                 const SilvermanOptions& opts = {});

}  // namespace survmix
