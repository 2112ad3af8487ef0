#pragma once

#include <string>

#include "survmix/fit.hpp"
#include "survmix/simulate.hpp"

namespace survmix {

// JSON persistence for fits. The schema (schema_version 1) carries variant,
// families, components with weights and parameters, the treatment
// coefficients for variants 2-4 (plus the derived scale difference alpha for
// variant 3, which is recomputed rather than read back), and the fit
// bookkeeping: loglik, n_params, aic, converged, iterations, seed,
// boundary_flag. Responsibilities and traces are in-memory diagnostics and
// are not serialized.
//
// Reading throws format_error on malformed JSON, missing fields, or an
// unknown schema_version, and validation_error on a structurally sound
// payload that violates a model invariant (weights not summing to 1,
// non-positive rates, ...).
std::string fit_to_json(const FitResult& fit);
FitResult fit_from_json(const std::string& text);

FitResult read_fit_json_file(const std::string& path);
void write_fit_json_file(const std::string& path, const FitResult& fit);

// Simulation scenario for the CLI: arm mixtures, arm sizes, censoring
// mechanism, seed. Same error conventions as the fit reader; the parsed
// spec is validated before it is returned.
TrialSpec trial_spec_from_json(const std::string& text);
TrialSpec read_trial_spec_file(const std::string& path);

}  // namespace survmix
