#pragma once

#include <stdexcept>
#include <string>

namespace survmix {

// Error taxonomy shared by library and CLI. The CLI maps these to exit codes:
// usage_error -> 1, data/format/validation -> 2, numerical/fit -> 3.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// argument outside the mathematical domain (t < 0, p outside (0,1), ...)
struct domain_error : error {
  using error::error;
};

// invalid distribution or model parameters (rate <= 0, weights not summing to 1, ...)
struct parameter_error : error {
  using error::error;
};

struct usage_error : error {
  using error::error;
};

// a bad record inside an otherwise readable file
struct data_error : error {
  using error::error;
};

// an unreadable or structurally broken file
struct format_error : error {
  using error::error;
};

// structurally valid payload violating a model invariant
struct validation_error : error {
  using error::error;
};

struct fit_error : error {
  using error::error;
};

// a fit collapsed (component starved of observations, single distinct time, ...)
struct degeneracy_error : fit_error {
  using fit_error::fit_error;
};

struct numerical_error : error {
  using error::error;
};

// weighted component densities do not cross between the two component medians
struct no_unique_cut_point : numerical_error {
  using numerical_error::numerical_error;
};

}  // namespace survmix
