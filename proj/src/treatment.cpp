#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fit_internal.hpp"
#include "survmix/error.hpp"
#include "survmix/fit.hpp"
#include "survmix/nelder_mead.hpp"
#include "survmix/special.hpp"

namespace survmix {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

MixtureModel arm_model(const TreatmentModelSpec& spec, Arm arm) {
  const double it = arm == Arm::Treated ? 1.0 : 0.0;
  // The EM keeps the mixing weights clamped well inside (0,1); the extra
  // pinch here only protects hand-built specs with extreme z from producing
  // a weight that rounds to exactly 0 or 1.
  double pi1 = expit(spec.z0 + spec.z1 * it);
  pi1 = std::min(std::max(pi1, 1e-12), 1.0 - 1e-12);

  MixtureModel m;
  for (int k = 0; k < 2; ++k) {
    const double loc = spec.loc0[k] + spec.loc1[k] * it;
    DistributionSpec s;
    s.family = spec.family[k];
    switch (spec.family[k]) {
      case Family::Exponential:
        s.params = {std::exp(loc)};
        break;
      case Family::Weibull:
      case Family::LogLogistic:
        s.params = {spec.shape[k], std::exp(loc)};
        break;
      case Family::LogNormal:
        s.params = {loc, spec.shape[k]};
        break;
    }
    m.components.push_back({k == 0 ? pi1 : 1.0 - pi1, std::move(s)});
  }
  validate(m);
  return m;
}

int treatment_param_count(const TreatmentModelSpec& spec) {
  const bool free_loc1 =
      spec.variant == Variant::V2 || spec.variant == Variant::V4;
  const bool free_z1 =
      spec.variant == Variant::V3 || spec.variant == Variant::V4;
  int n = 0;
  for (int k = 0; k < 2; ++k) {
    if (spec.family[k] != Family::Exponential) ++n;  // shape or sigma
    ++n;                                             // loc0
    if (free_loc1) ++n;                              // loc1
  }
  ++n;                // z0
  if (free_z1) ++n;   // z1
  return n;
}

namespace {

// Per-arm evaluation tables for one spec: natural parameters and log
// weights of both components under each arm.
struct ArmTables {
  double p[2][2][2];   // [arm][component][param]
  double logw[2][2];   // [arm][component]
};

ArmTables build_tables(const TreatmentModelSpec& spec) {
  ArmTables t{};
  for (int a = 0; a < 2; ++a) {
    const MixtureModel m =
        arm_model(spec, a == 0 ? Arm::Control : Arm::Treated);
    for (int k = 0; k < 2; ++k) {
      t.logw[a][k] = std::log(m.components[k].weight);
      const auto& par = m.components[k].spec.params;
      for (std::size_t i = 0; i < par.size(); ++i) t.p[a][k][i] = par[i];
    }
  }
  return t;
}

double pooled_loglik(const TreatmentModelSpec& spec, const PreparedData& d) {
  const ArmTables t = build_tables(spec);
  double sum = 0.0;
  for (std::size_t j = 0; j < d.n(); ++j) {
    const int a = d.arm[j];
    double acc = -kInf;
    for (int k = 0; k < 2; ++k) {
      const double term =
          d.event[j] ? log_pdf_raw(spec.family[k], t.p[a][k], d.time[j],
                                   d.log_time[j])
                     : log_survival_raw(spec.family[k], t.p[a][k], d.time[j],
                                        d.log_time[j]);
      acc = log_sum_exp(acc, t.logw[a][k] + term);
    }
    sum += acc;
  }
  return sum;
}

void e_step_arms(const TreatmentModelSpec& spec, const PreparedData& d,
                 std::vector<double>& z) {
  const ArmTables t = build_tables(spec);
  z.resize(d.n());
  for (std::size_t j = 0; j < d.n(); ++j) {
    const int a = d.arm[j];
    double v[2];
    for (int k = 0; k < 2; ++k) {
      const double term =
          d.event[j] ? log_pdf_raw(spec.family[k], t.p[a][k], d.time[j],
                                   d.log_time[j])
                     : log_survival_raw(spec.family[k], t.p[a][k], d.time[j],
                                        d.log_time[j]);
      v[k] = t.logw[a][k] + term;
    }
    const double diff = v[0] - v[1];
    if (std::isnan(diff)) {
      throw numerical_error("treatment fit: both components vanish at "
                            "observation " +
                            std::to_string(d.orig[j] + 1));
    }
    z[d.orig[j]] = expit(diff);
  }
}

// Coordinates of one component's free scale parameters:
// arm-varying (variants 2/4): {log shape, loc0, loc1} (no shape for
// exponential); arm-constant (variant 3): {log shape, loc0}.
std::vector<double> component_coords(const TreatmentModelSpec& spec, int k,
                                     bool free_loc1) {
  std::vector<double> x;
  if (spec.family[k] != Family::Exponential) {
    x.push_back(std::log(spec.shape[k]));
  }
  x.push_back(spec.loc0[k]);
  if (free_loc1) x.push_back(spec.loc1[k]);
  return x;
}

void apply_component_coords(TreatmentModelSpec& spec, int k, bool free_loc1,
                            const std::vector<double>& x) {
  std::size_t i = 0;
  if (spec.family[k] != Family::Exponential) {
    spec.shape[k] = std::exp(x[i++]);
  }
  spec.loc0[k] = x[i++];
  if (free_loc1) spec.loc1[k] = x[i++];
}

bool component_coords_out_of_bounds(Family family,
                                    const std::vector<double>& x,
                                    bool free_loc1) {
  std::size_t i = 0;
  if (family != Family::Exponential) {
    if (std::fabs(x[i++]) > detail::kLogCoordBound) return true;
  }
  const double loc_bound = family == Family::LogNormal
                               ? detail::kLocCoordBound
                               : detail::kLogCoordBound;
  if (std::fabs(x[i++]) > loc_bound) return true;
  if (free_loc1 && std::fabs(x[i]) > detail::kLogCoordBound) return true;
  return false;
}

// Maximizes one component's responsibility-weighted censored log-likelihood
// over its free coordinates, warm-started from the current spec. w is in
// original row indexing; null means unweighted (collapse refit).
void update_component(TreatmentModelSpec& spec, int k, bool free_loc1,
                      const PreparedData& d, const double* w) {
  const Family family = spec.family[k];
  auto objective = [&](const std::vector<double>& x) -> double {
    for (double xi : x) {
      if (std::fabs(xi) > (family == Family::LogNormal
                               ? detail::kLocCoordBound
                               : detail::kCoordWall)) {
        return kInf;
      }
    }
    TreatmentModelSpec trial = spec;
    apply_component_coords(trial, k, free_loc1, x);
    // Natural parameters per arm for this component only.
    double p[2][2];
    for (int a = 0; a < 2; ++a) {
      const double loc = trial.loc0[k] + trial.loc1[k] * a;
      switch (family) {
        case Family::Exponential:
          p[a][0] = std::exp(loc);
          break;
        case Family::Weibull:
        case Family::LogLogistic:
          p[a][0] = trial.shape[k];
          p[a][1] = std::exp(loc);
          break;
        case Family::LogNormal:
          p[a][0] = loc;
          p[a][1] = trial.shape[k];
          break;
      }
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < d.n(); ++j) {
      const double wj = w ? w[d.orig[j]] : 1.0;
      if (wj == 0.0) continue;
      const int a = d.arm[j];
      sum += wj * (d.event[j]
                       ? log_pdf_raw(family, p[a], d.time[j], d.log_time[j])
                       : log_survival_raw(family, p[a], d.time[j],
                                          d.log_time[j]));
    }
    return std::isfinite(sum) ? -sum : kInf;
  };

  NelderMeadOptions nm;
  nm.init_step = 0.1;
  const NelderMeadResult r =
      nelder_mead(objective, component_coords(spec, k, free_loc1), nm);
  if (component_coords_out_of_bounds(family, r.x, free_loc1)) {
    throw degeneracy_error(
        "treatment fit: component " + std::to_string(k + 1) +
        " drove a parameter to its boundary (degenerate likelihood)");
  }
  apply_component_coords(spec, k, free_loc1, r.x);
}

}  // namespace

FitResult fit_treatment_model(const Dataset& data, Variant variant,
                              std::pair<Family, Family> families,
                              const FitOptions& opts) {
  validate(opts);
  if (variant == Variant::V0) return fit_simple(families.first, data, opts);
  if (variant == Variant::V1) return em_fit(families, data, opts);

  const PreparedData d = prepare(data);
  std::size_t n_arm[2] = {0, 0}, events_arm[2] = {0, 0};
  for (std::size_t j = 0; j < d.n(); ++j) {
    if (d.arm[j] < 0) {
      throw data_error(
          "treatment fit requires an arm label on every observation");
    }
    ++n_arm[d.arm[j]];
    events_arm[d.arm[j]] += d.event[j];
  }
  if (n_arm[0] == 0 || n_arm[1] == 0) {
    throw data_error("treatment fit requires subjects in both arms");
  }
  if (events_arm[0] < 5 || events_arm[1] < 5) {
    throw fit_error("treatment fit: each arm needs at least 5 events");
  }

  // Initialize every variant from the arm-blind mixture fit.
  const FitResult v1 = em_fit(families, data, opts);
  TreatmentModelSpec spec;
  spec.variant = variant;
  for (int k = 0; k < 2; ++k) {
    const DistributionSpec& s = v1.model.components[k].spec;
    spec.family[k] = s.family;
    switch (s.family) {
      case Family::Exponential:
        spec.loc0[k] = std::log(s.params[0]);
        break;
      case Family::Weibull:
      case Family::LogLogistic:
        spec.shape[k] = s.params[0];
        spec.loc0[k] = std::log(s.params[1]);
        break;
      case Family::LogNormal:
        spec.loc0[k] = s.params[0];
        spec.shape[k] = s.params[1];
        break;
    }
    spec.loc1[k] = 0.0;
  }
  spec.z0 = logit(detail::clamp_weight(v1.model.components[0].weight,
                                       opts.weight_floor));
  spec.z1 = 0.0;

  const bool free_loc1 = variant == Variant::V2 || variant == Variant::V4;
  const bool free_z1 = variant == Variant::V3 || variant == Variant::V4;

  std::vector<double> z(d.n()), w2(d.n());
  std::vector<double> trace;
  double last = -kInf;
  bool converged = false, clamped = false;
  int iterations = 0;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    e_step_arms(spec, d, z);

    // Mixing update, closed form: arm-wise (or pooled) mean responsibility,
    // clamped and mapped back through the logit.
    double mass[2] = {0.0, 0.0}, count[2] = {0.0, 0.0};
    for (std::size_t j = 0; j < d.n(); ++j) {
      mass[d.arm[j]] += z[d.orig[j]];
      count[d.arm[j]] += 1.0;
    }
    clamped = false;
    if (free_z1) {
      const double pc_raw = mass[0] / count[0];
      const double pt_raw = mass[1] / count[1];
      const double pc = detail::clamp_weight(pc_raw, opts.weight_floor);
      const double pt = detail::clamp_weight(pt_raw, opts.weight_floor);
      clamped = pc != pc_raw || pt != pt_raw;
      spec.z0 = logit(pc);
      spec.z1 = logit(pt) - spec.z0;
    } else {
      const double p_raw = (mass[0] + mass[1]) / (count[0] + count[1]);
      const double p = detail::clamp_weight(p_raw, opts.weight_floor);
      clamped = p != p_raw;
      spec.z0 = logit(p);
      spec.z1 = 0.0;
    }

    // Component updates: same collapse/degeneracy rules as the plain EM.
    const double m1 = mass[0] + mass[1];
    const double m2 = count[0] + count[1] - m1;
    for (int k = 0; k < 2; ++k) {
      const double mk = k == 0 ? m1 : m2;
      const double* w = nullptr;
      if (mk >= 1e-9) {
        if (mk < 3.0) {
          throw degeneracy_error("treatment fit: component " +
                                 std::to_string(k + 1) +
                                 " effective weight mass is below 3 "
                                 "observations");
        }
        if (k == 0) {
          w = z.data();
        } else {
          for (std::size_t i = 0; i < d.n(); ++i) w2[i] = 1.0 - z[i];
          w = w2.data();
        }
      }
      update_component(spec, k, free_loc1, d, w);
    }

    const double ll = pooled_loglik(spec, d);
    if (!std::isfinite(ll)) {
      throw numerical_error("treatment fit produced a non-finite "
                            "log-likelihood");
    }
    trace.push_back(ll);
    ++iterations;
    if (iter > 0 && std::fabs(ll - last) < opts.tol) {
      converged = true;
      last = ll;
      break;
    }
    last = ll;
  }

  // Canonical order by the control arm: component 1 gets the shorter
  // control median (ties: the smaller control weight). Swapping components
  // flips the sign of both mixing coefficients.
  {
    const MixtureModel control = arm_model(spec, Arm::Control);
    const double med0 = median(control.components[0].spec);
    const double med1 = median(control.components[1].spec);
    const double pi1 = control.components[0].weight;
    if (med0 > med1 || (med0 == med1 && pi1 > 1.0 - pi1)) {
      std::swap(spec.family[0], spec.family[1]);
      std::swap(spec.shape[0], spec.shape[1]);
      std::swap(spec.loc0[0], spec.loc0[1]);
      std::swap(spec.loc1[0], spec.loc1[1]);
      spec.z0 = -spec.z0;
      spec.z1 = -spec.z1;
    }
  }

  FitResult r;
  r.variant = variant;
  r.model = arm_model(spec, Arm::Control);
  r.treatment = spec;
  r.loglik = last;
  r.n_params = treatment_param_count(spec);
  r.aic = -2.0 * r.loglik + 2.0 * r.n_params;
  e_step_arms(spec, d, z);
  r.responsibilities = z;
  r.iterations = iterations;
  r.converged = converged;
  r.loglik_trace = trace;
  r.boundary_flag = clamped;
  r.start_index = 0;
  r.seed = opts.seed;
  r.start_traces = {std::move(trace)};
  return r;
}

}  // namespace survmix
