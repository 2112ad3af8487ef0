#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "survmix/data.hpp"
#include "survmix/mixture.hpp"

namespace survmix {

struct FitOptions {
  double tol = 1e-6;          // stop EM when |loglik change| falls below this
  int max_iter = 500;         // EM iteration cap
  int n_starts = 10;          // EM initializations (first one deterministic)
  std::uint64_t seed = 0;
  double weight_floor = 1e-3; // mixture weights clamped to [floor, 1-floor]
  int threads = 1;            // workers for multi-start / replicate loops
};

// Throws usage_error on out-of-range options.
void validate(const FitOptions& opts);

// Model ladder: 0 = single distribution, 1 = two-component mixture,
// 2 = treatment shifts the component scales, 3 = treatment shifts the
// mixing proportion, 4 = both.
enum class Variant { V0 = 0, V1 = 1, V2 = 2, V3 = 3, V4 = 4 };

// Two-component mixture whose parameters depend on the treatment arm
// (IT = 0 control, 1 treated):
//   component scale: rate families  log lambda_k(arm) = loc0[k] + loc1[k]*IT
//                    lognormal          mu_k(arm)     = loc0[k] + loc1[k]*IT
//   mixing:          pi_1(arm) = expit(z0 + z1*IT)
//   shapes (Weibull/log-logistic k, lognormal sigma) shared across arms.
// Variant 2 fixes z1 = 0; variant 3 fixes loc1 = 0; variant 4 frees both.
struct TreatmentModelSpec {
  Variant variant = Variant::V4;
  Family family[2] = {Family::Weibull, Family::Weibull};
  double shape[2] = {1.0, 1.0};  // unused for exponential components
  double loc0[2] = {0.0, 0.0};
  double loc1[2] = {0.0, 0.0};
  double z0 = 0.0;
  double z1 = 0.0;
};

// The concrete mixture a given arm lives under.
MixtureModel arm_model(const TreatmentModelSpec& spec, Arm arm);

// Free parameters of the model: shapes present in its families, plus the
// location and mixing coefficients its variant lets vary (7/6/8 for variants
// 2/3/4 with two-parameter families).
int treatment_param_count(const TreatmentModelSpec& spec);

struct FitResult {
  Variant variant = Variant::V0;
  // Fitted mixture in canonical order (component 1 = shorter median). For
  // treatment variants this is the control-arm mixture; the arm structure
  // lives in `treatment`.
  MixtureModel model;
  std::optional<TreatmentModelSpec> treatment;
  double loglik = 0.0;
  int n_params = 0;
  double aic = 0.0;
  // P(component 1 | observation), aligned with input rows; empty for
  // single-distribution fits. Treatment fits evaluate each subject under its
  // own arm's mixture.
  std::vector<double> responsibilities;
  int iterations = 0;
  bool converged = false;
  std::vector<double> loglik_trace;  // winning start, one entry per iteration
  bool boundary_flag = false;        // a mixing weight ended on its clamp
  int start_index = 0;
  std::uint64_t seed = 0;
  // Trace of every start (diagnostics; not serialized). Failed starts keep
  // whatever prefix they reached.
  std::vector<std::vector<double>> start_traces;
};

// Maximum-likelihood fit of a single distribution to censored data.
FitResult fit_simple(Family family, const Dataset& data,
                     const FitOptions& opts = {});

// Posterior probability of component 1 per subject: events compare weighted
// densities, censored subjects weighted survival functions. Two-component
// models only.
std::vector<double> e_step(const MixtureModel& model, const Dataset& data);

// One maximization step: pi_1 = clamped mean responsibility; each component
// refit by its responsibility-weighted censored likelihood. A component
// whose responsibility mass is (numerically) zero collapses onto the other
// component's parameters; mass below 3 observations but above zero is an
// error.
MixtureModel m_step(const Dataset& data,
                    const std::vector<double>& responsibilities,
                    std::pair<Family, Family> families,
                    const FitOptions& opts = {});

// Two-component mixture fit by EM with multiple starts: start 0 splits the
// sample at its median, the rest assign components by coin flips from the
// seeded stream. Returns the best start, canonicalized.
FitResult em_fit(std::pair<Family, Family> families, const Dataset& data,
                 const FitOptions& opts = {});

// Fits the treatment-structured variants (2-4) by generalized EM,
// initialized from the variant-1 fit. Variants 0/1 delegate to
// fit_simple(first family)/em_fit.
FitResult fit_treatment_model(const Dataset& data, Variant variant,
                              std::pair<Family, Family> families,
                              const FitOptions& opts = {});

}  // namespace survmix
