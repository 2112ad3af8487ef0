#include "survmix/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "fit_internal.hpp"
#include "survmix/error.hpp"
#include "survmix/nelder_mead.hpp"
#include "survmix/parallel.hpp"
#include "survmix/random.hpp"
#include "survmix/special.hpp"

namespace survmix {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// Substream tag for EM start initializations: stream (seed, kTagEmStart, s).
constexpr std::uint64_t kTagEmStart = 1;
}  // namespace

void validate(const FitOptions& opts) {
  if (!(opts.tol > 0.0)) throw usage_error("fit options: tol must be > 0");
  if (opts.max_iter < 1) throw usage_error("fit options: max_iter must be >= 1");
  if (opts.n_starts < 1) throw usage_error("fit options: n_starts must be >= 1");
  if (!(opts.weight_floor > 0.0 && opts.weight_floor < 0.5)) {
    throw usage_error("fit options: weight_floor must lie in (0, 0.5)");
  }
  if (opts.threads < 1) throw usage_error("fit options: threads must be >= 1");
}

namespace detail {

int coord_count(Family family) {
  return family == Family::Exponential ? 1 : 2;
}

void coords_to_params(Family family, const std::vector<double>& x, double* p) {
  switch (family) {
    case Family::Exponential:
      p[0] = std::exp(x[0]);
      break;
    case Family::Weibull:
    case Family::LogLogistic:
      p[0] = std::exp(x[0]);
      p[1] = std::exp(x[1]);
      break;
    case Family::LogNormal:
      p[0] = x[0];
      p[1] = std::exp(x[1]);
      break;
  }
}

std::vector<double> params_to_coords(Family family, const double* p) {
  switch (family) {
    case Family::Exponential:
      return {std::log(p[0])};
    case Family::Weibull:
    case Family::LogLogistic:
      return {std::log(p[0]), std::log(p[1])};
    case Family::LogNormal:
      return {p[0], std::log(p[1])};
  }
  return {};
}

bool coords_out_of_bounds(Family family, const std::vector<double>& x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool is_loc = family == Family::LogNormal && i == 0;
    const double bound = is_loc ? kLocCoordBound : kLogCoordBound;
    if (std::fabs(x[i]) > bound) return true;
  }
  return false;
}

double clamp_weight(double p, double floor) {
  return std::min(std::max(p, floor), 1.0 - floor);
}

namespace {

// Weighted median of event times (all times when there are no events),
// walking the canonical order so the value is permutation-invariant.
double weighted_event_median(const PreparedData& d, const double* w) {
  double total = 0.0;
  for (std::size_t j = 0; j < d.n(); ++j) {
    if (d.event[j]) total += w ? w[d.orig[j]] : 1.0;
  }
  const bool events_only = total > 0.0;
  if (!events_only) {
    for (std::size_t j = 0; j < d.n(); ++j) total += w ? w[d.orig[j]] : 1.0;
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < d.n(); ++j) {
    if (events_only && !d.event[j]) continue;
    acc += w ? w[d.orig[j]] : 1.0;
    if (acc >= 0.5 * total) return d.time[j];
  }
  return d.time[d.n() - 1];
}

// Heuristic starting coordinates for one family under the given weights.
std::vector<std::vector<double>> cold_starts(Family family,
                                             const PreparedData& d,
                                             const double* w) {
  double w_event = 0.0, wt_sum = 0.0;
  for (std::size_t j = 0; j < d.n(); ++j) {
    const double wj = w ? w[d.orig[j]] : 1.0;
    if (d.event[j]) w_event += wj;
    wt_sum += wj * d.time[j];
  }
  // Safe fallbacks for weight patterns with (almost) no event mass; those
  // fits end degenerate anyway, the start just has to be finite.
  if (!(w_event > 1e-12)) w_event = 1e-12;
  if (!(wt_sum > 0.0)) wt_sum = 1.0;

  switch (family) {
    case Family::Exponential:
      // Closed-form weighted censored MLE.
      return {{std::log(w_event / wt_sum)}};
    case Family::Weibull: {
      // Profile the rate at a few shapes: lambda(k) = sum(w delta) /
      // sum(w t^k); every observation contributes -lambda t^k.
      std::vector<std::vector<double>> starts;
      for (double k : {1.0, 0.5, 2.0}) {
        double tk = 0.0;
        for (std::size_t j = 0; j < d.n(); ++j) {
          tk += (w ? w[d.orig[j]] : 1.0) * std::exp(k * d.log_time[j]);
        }
        if (!(tk > 0.0)) tk = 1.0;
        starts.push_back({std::log(k), std::log(w_event / tk)});
      }
      return starts;
    }
    case Family::LogLogistic: {
      const double med = weighted_event_median(d, w);
      std::vector<std::vector<double>> starts;
      for (double k : {1.0, 2.0}) {
        // median = lambda^(-1/k)  =>  lambda = med^-k.
        starts.push_back({std::log(k), -k * std::log(med)});
      }
      return starts;
    }
    case Family::LogNormal: {
      double wl = 0.0, wl2 = 0.0, mass = 0.0;
      for (std::size_t j = 0; j < d.n(); ++j) {
        const double wj = w ? w[d.orig[j]] : 1.0;
        if (!d.event[j] && w_event > 1e-6) continue;
        wl += wj * d.log_time[j];
        wl2 += wj * d.log_time[j] * d.log_time[j];
        mass += wj;
      }
      if (!(mass > 0.0)) mass = 1.0;
      const double mu = wl / mass;
      const double var = std::max(wl2 / mass - mu * mu, 0.0);
      const double sigma = std::max(std::sqrt(var), 1e-3);
      return {{mu, std::log(sigma)}};
    }
  }
  return {};
}

}  // namespace

ComponentFit fit_component(Family family, const PreparedData& d,
                           const double* w, const DistributionSpec* warm,
                           bool thorough) {
  auto objective = [&](const std::vector<double>& x) -> double {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const bool is_loc = family == Family::LogNormal && i == 0;
      if (std::fabs(x[i]) > (is_loc ? kLocCoordBound : kCoordWall)) {
        return kInf;
      }
    }
    double p[2];
    coords_to_params(family, x, p);
    return -(w ? weighted_loglik_prepared(family, p, d, w)
               : loglik_prepared(family, p, d));
  };

  std::vector<std::vector<double>> starts = cold_starts(family, d, w);
  if (!thorough && starts.size() > 1) {
    // Keep only the best-scoring cold candidate.
    std::size_t best = 0;
    double best_v = objective(starts[0]);
    for (std::size_t i = 1; i < starts.size(); ++i) {
      const double v = objective(starts[i]);
      if (v < best_v) {
        best_v = v;
        best = i;
      }
    }
    starts = {starts[best]};
  }
  if (warm) {
    starts.insert(starts.begin(), params_to_coords(family, warm->params.data()));
  }

  NelderMeadOptions nm;
  // A warm start sits near the optimum already; a tight initial simplex
  // saves a large share of the evaluations across EM iterations.
  ComponentFit out;
  double best_value = kInf;
  std::vector<double> best_x;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    nm.init_step = (warm && s == 0) ? 0.05 : 0.25;
    const NelderMeadResult r = nelder_mead(objective, starts[s], nm);
    out.evals += r.evals;
    if (r.value < best_value) {
      best_value = r.value;
      best_x = r.x;
      out.start_index = static_cast<int>(s);
      out.converged = r.converged;
    }
  }
  if (best_x.empty() || coords_out_of_bounds(family, best_x)) {
    throw degeneracy_error(
        std::string(family_name(family)) +
        " fit drove a parameter to its boundary (degenerate likelihood)");
  }
  double p[2];
  coords_to_params(family, best_x, p);
  out.spec.family = family;
  out.spec.params.assign(p, p + param_count(family));
  out.loglik = -best_value;
  return out;
}

void e_step_prepared(const MixtureModel& model, const PreparedData& d,
                     std::vector<double>& z) {
  const auto& c1 = model.components[0];
  const auto& c2 = model.components[1];
  const double lw1 = std::log(c1.weight);
  const double lw2 = std::log(c2.weight);
  z.resize(d.n());
  for (std::size_t j = 0; j < d.n(); ++j) {
    const double t = d.time[j], lt = d.log_time[j];
    double a, b;
    if (d.event[j]) {
      a = lw1 + log_pdf_raw(c1.spec.family, c1.spec.params.data(), t, lt);
      b = lw2 + log_pdf_raw(c2.spec.family, c2.spec.params.data(), t, lt);
    } else {
      a = lw1 + log_survival_raw(c1.spec.family, c1.spec.params.data(), t, lt);
      b = lw2 + log_survival_raw(c2.spec.family, c2.spec.params.data(), t, lt);
    }
    const double diff = a - b;
    if (std::isnan(diff)) {
      throw numerical_error(
          "e_step: both components vanish at observation " +
          std::to_string(d.orig[j] + 1));
    }
    z[d.orig[j]] = expit(diff);
  }
}

}  // namespace detail

namespace {

struct MStepOutcome {
  MixtureModel model;
  bool clamped = false;
};

MStepOutcome m_step_impl(const PreparedData& d, const std::vector<double>& z,
                         std::pair<Family, Family> families,
                         const FitOptions& opts, const MixtureModel* warm,
                         bool thorough) {
  const std::size_t n = d.n();
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    m1 += z[d.orig[j]];
    m2 += 1.0 - z[d.orig[j]];
  }
  // A component with literally no responsibility mass collapses: the
  // mixture has degenerated to one distribution, so the dead component is
  // refit against the whole sample (matching the live one). Small-but-
  // nonzero mass cannot support a fit and is an error.
  const bool dead1 = m1 < 1e-9, dead2 = m2 < 1e-9;
  if (dead1 && dead2) throw degeneracy_error("m_step: empty dataset");
  if (!dead1 && m1 < 3.0) {
    throw degeneracy_error(
        "m_step: component 1 effective weight mass is below 3 observations");
  }
  if (!dead2 && m2 < 3.0) {
    throw degeneracy_error(
        "m_step: component 2 effective weight mass is below 3 observations");
  }

  std::vector<double> w1(n), w2(n);
  for (std::size_t i = 0; i < n; ++i) {
    w1[i] = z[i];
    w2[i] = 1.0 - z[i];
  }
  const DistributionSpec* warm1 = warm ? &warm->components[0].spec : nullptr;
  const DistributionSpec* warm2 = warm ? &warm->components[1].spec : nullptr;
  DistributionSpec s1, s2;
  if (!dead1) {
    s1 = detail::fit_component(families.first, d, w1.data(), warm1, thorough)
             .spec;
  } else {
    s1 = detail::fit_component(families.first, d, nullptr, warm1, thorough)
             .spec;
  }
  if (!dead2) {
    s2 = detail::fit_component(families.second, d, w2.data(), warm2, thorough)
             .spec;
  } else {
    s2 = detail::fit_component(families.second, d, nullptr, warm2, thorough)
             .spec;
  }

  const double raw = m1 / static_cast<double>(n);
  const double pi1 = detail::clamp_weight(raw, opts.weight_floor);
  MStepOutcome out;
  out.clamped = pi1 != raw;
  out.model.components = {{pi1, std::move(s1)}, {1.0 - pi1, std::move(s2)}};
  return out;
}

}  // namespace

FitResult fit_simple(Family family, const Dataset& data,
                     const FitOptions& opts) {
  validate(opts);
  const PreparedData d = prepare(data);
  if (d.n_events < 1) {
    throw fit_error("fit_simple: dataset has no observed events");
  }
  if (d.n() < static_cast<std::size_t>(param_count(family))) {
    throw fit_error("fit_simple: fewer observations than parameters");
  }
  const detail::ComponentFit cf =
      detail::fit_component(family, d, nullptr, nullptr, /*thorough=*/true);

  FitResult r;
  r.variant = Variant::V0;
  r.model.components = {{1.0, cf.spec}};
  r.loglik = cf.loglik;
  r.n_params = param_count(family);
  r.aic = -2.0 * r.loglik + 2.0 * r.n_params;
  r.iterations = cf.evals;
  r.converged = cf.converged;
  r.loglik_trace = {r.loglik};
  r.start_index = cf.start_index;
  r.seed = opts.seed;
  r.start_traces = {r.loglik_trace};
  return r;
}

std::vector<double> e_step(const MixtureModel& model, const Dataset& data) {
  validate(model);
  if (model.size() != 2) {
    throw usage_error("e_step requires a two-component model");
  }
  const PreparedData d = prepare(data);
  std::vector<double> z;
  detail::e_step_prepared(model, d, z);
  return z;
}

MixtureModel m_step(const Dataset& data,
                    const std::vector<double>& responsibilities,
                    std::pair<Family, Family> families,
                    const FitOptions& opts) {
  validate(opts);
  const PreparedData d = prepare(data);
  if (responsibilities.size() != d.n()) {
    throw usage_error("m_step: responsibilities length does not match data");
  }
  for (double zi : responsibilities) {
    if (!(zi >= 0.0 && zi <= 1.0)) {
      throw domain_error("m_step: responsibilities must lie in [0,1]");
    }
  }
  return m_step_impl(d, responsibilities, families, opts, nullptr,
                     /*thorough=*/true)
      .model;
}

namespace {

struct StartOutcome {
  bool ok = false;
  MixtureModel model;
  double loglik = -kInf;
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
  bool clamped = false;
  std::string failure;
};

StartOutcome run_em_start(const PreparedData& d, std::vector<double> z,
                          std::pair<Family, Family> families,
                          const FitOptions& opts) {
  StartOutcome out;
  try {
    const MixtureModel* warm = nullptr;
    MStepOutcome step;
    double last = -kInf;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
      step = m_step_impl(d, z, families, opts, warm, /*thorough=*/false);
      warm = &step.model;
      const double ll = mixture_loglik_prepared(step.model, d);
      if (!std::isfinite(ll)) {
        throw numerical_error("EM produced a non-finite log-likelihood");
      }
      out.trace.push_back(ll);
      ++out.iterations;
      if (iter > 0 && std::fabs(ll - last) < opts.tol) {
        out.converged = true;
        last = ll;
        break;
      }
      last = ll;
      detail::e_step_prepared(step.model, d, z);
    }
    out.model = step.model;
    out.loglik = last;
    out.clamped = step.clamped;
    out.ok = true;
  } catch (const error& e) {
    out.failure = e.what();
  }
  return out;
}

}  // namespace

FitResult em_fit(std::pair<Family, Family> families, const Dataset& data,
                 const FitOptions& opts) {
  validate(opts);
  const PreparedData d = prepare(data);
  const std::size_t n = d.n();
  if (n < 10) throw fit_error("em_fit: need at least 10 observations");
  if (d.n_events < 2) throw fit_error("em_fit: need at least 2 events");

  // Start 0: deterministic split at the sample median (lower half of the
  // canonical time order seeds component 1). Remaining starts: fair coin
  // per subject, one substream per start, drawn in canonical order so the
  // assignment does not depend on row order.
  const int n_starts = opts.n_starts;
  std::vector<StartOutcome> outcomes(n_starts);
  parallel_for(static_cast<std::size_t>(n_starts), opts.threads,
               [&](std::size_t s) {
                 std::vector<double> z(n);
                 if (s == 0) {
                   for (std::size_t j = 0; j < n; ++j) {
                     z[d.orig[j]] = j <= (n - 1) / 2 ? 1.0 : 0.0;
                   }
                 } else {
                   RandomStream rng(opts.seed, kTagEmStart, s);
                   for (std::size_t j = 0; j < n; ++j) {
                     z[d.orig[j]] = rng.bernoulli(0.5) ? 1.0 : 0.0;
                   }
                 }
                 outcomes[s] = run_em_start(d, std::move(z), families, opts);
               });

  int winner = -1;
  for (int s = 0; s < n_starts; ++s) {
    if (!outcomes[s].ok) continue;
    if (winner < 0 || outcomes[s].loglik > outcomes[winner].loglik) winner = s;
  }
  if (winner < 0) {
    std::set<std::string> causes;
    for (const auto& o : outcomes) causes.insert(o.failure);
    std::string msg = "em_fit: every start failed:";
    for (const auto& c : causes) msg += " [" + c + "]";
    throw fit_error(msg);
  }

  const StartOutcome& best = outcomes[winner];
  FitResult r;
  r.variant = Variant::V1;
  r.model = canonicalize(best.model);
  r.loglik = best.loglik;
  r.n_params = 1;
  for (const auto& c : r.model.components) {
    r.n_params += param_count(c.spec.family);
  }
  r.aic = -2.0 * r.loglik + 2.0 * r.n_params;
  detail::e_step_prepared(r.model, d, r.responsibilities);
  r.iterations = best.iterations;
  r.converged = best.converged;
  r.loglik_trace = best.trace;
  r.boundary_flag = best.clamped;
  r.start_index = winner;
  r.seed = opts.seed;
  for (auto& o : outcomes) r.start_traces.push_back(std::move(o.trace));
  return r;
}

}  // namespace survmix
