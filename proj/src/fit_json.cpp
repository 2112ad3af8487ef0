#include "survmix/fit_json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "survmix/error.hpp"

namespace survmix {

namespace {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

json mixture_to_json(const MixtureModel& model) {
  json components = json::array();
  for (const MixtureComponent& c : model.components) {
    components.push_back({{"weight", c.weight},
                          {"family", family_name(c.spec.family)},
                          {"params", c.spec.params}});
  }
  return components;
}

// loc0/loc1 are log-rates for the rate families and mu directly for the
// lognormal, so the natural-scale component difference reported for
// variant 3 undoes the log only where one was taken.
double natural_scale(Family family, double loc) {
  return family == Family::LogNormal ? loc : std::exp(loc);
}

json treatment_to_json(const TreatmentModelSpec& spec) {
  json coef = {{"shape1", spec.shape[0]}, {"shape2", spec.shape[1]},
               {"loc0_1", spec.loc0[0]},  {"loc1_1", spec.loc1[0]},
               {"loc0_2", spec.loc0[1]},  {"loc1_2", spec.loc1[1]},
               {"z0", spec.z0},           {"z1", spec.z1}};
  if (spec.variant == Variant::V3)
    coef["alpha"] = natural_scale(spec.family[1], spec.loc0[1]) -
                    natural_scale(spec.family[0], spec.loc0[0]);
  return coef;
}

// Wraps the json library's type/missing-key exceptions into format_error so
// callers see one taxonomy.
template <typename F>
auto reading(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw format_error(std::string(what) + ": " + e.what());
  }
}

MixtureModel mixture_from_json(const json& components) {
  MixtureModel model;
  for (const json& c : components) {
    MixtureComponent comp;
    comp.weight = c.at("weight").get<double>();
    comp.spec.family = family_from_name(c.at("family").get<std::string>());
    comp.spec.params = c.at("params").get<std::vector<double>>();
    model.components.push_back(std::move(comp));
  }
  try {
    validate(model);
  } catch (const error& e) {
    throw validation_error(e.what());
  }
  return model;
}

CensoringSpec censoring_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  CensoringSpec c;
  if (kind == "none") {
    c = no_censoring();
  } else if (kind == "administrative") {
    c = administrative(j.at("cutoff").get<double>());
  } else if (kind == "independent_exponential") {
    c = independent_exponential(j.at("rate").get<double>());
  } else if (kind == "independent_uniform") {
    c = independent_uniform(j.at("max").get<double>());
  } else {
    throw format_error("unknown censoring kind '" + kind + "'");
  }
  if (j.contains("admin_cutoff")) {
    c.admin_cutoff = j.at("admin_cutoff").get<double>();
    validate(c);
  }
  return c;
}

}  // namespace

std::string fit_to_json(const FitResult& fit) {
  json out;
  out["schema_version"] = kSchemaVersion;
  out["variant"] = static_cast<int>(fit.variant);
  json families = json::array();
  for (const MixtureComponent& c : fit.model.components)
    families.push_back(family_name(c.spec.family));
  out["families"] = families;
  out["components"] = mixture_to_json(fit.model);
  if (fit.treatment) out["treatment_coefficients"] = treatment_to_json(*fit.treatment);
  out["loglik"] = fit.loglik;
  out["n_params"] = fit.n_params;
  out["aic"] = fit.aic;
  out["converged"] = fit.converged;
  out["iterations"] = fit.iterations;
  out["seed"] = fit.seed;
  out["boundary_flag"] = fit.boundary_flag;
  return out.dump(2) + "\n";
}

FitResult fit_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw format_error(std::string("fit JSON does not parse: ") + e.what());
  }
  return reading("fit JSON", [&] {
    if (!doc.is_object()) throw format_error("fit JSON: top level must be an object");
    const int version = doc.at("schema_version").get<int>();
    if (version != kSchemaVersion)
      throw format_error("fit JSON: unknown schema_version " + std::to_string(version));

    FitResult fit;
    const int variant = doc.at("variant").get<int>();
    if (variant < 0 || variant > 4)
      throw validation_error("fit JSON: variant must be 0..4");
    fit.variant = static_cast<Variant>(variant);
    fit.model = mixture_from_json(doc.at("components"));

    const auto families = doc.at("families").get<std::vector<std::string>>();
    if (families.size() != fit.model.size())
      throw validation_error("fit JSON: families and components disagree");
    for (std::size_t k = 0; k < families.size(); ++k)
      if (family_from_name(families[k]) != fit.model.components[k].spec.family)
        throw validation_error("fit JSON: families and components disagree");

    if (doc.contains("treatment_coefficients")) {
      if (variant < 2)
        throw validation_error("fit JSON: treatment coefficients on a pooled fit");
      if (fit.model.size() != 2)
        throw validation_error("fit JSON: treatment fits are two-component");
      const json& coef = doc.at("treatment_coefficients");
      TreatmentModelSpec spec;
      spec.variant = fit.variant;
      spec.family[0] = fit.model.components[0].spec.family;
      spec.family[1] = fit.model.components[1].spec.family;
      spec.shape[0] = coef.at("shape1").get<double>();
      spec.shape[1] = coef.at("shape2").get<double>();
      spec.loc0[0] = coef.at("loc0_1").get<double>();
      spec.loc1[0] = coef.at("loc1_1").get<double>();
      spec.loc0[1] = coef.at("loc0_2").get<double>();
      spec.loc1[1] = coef.at("loc1_2").get<double>();
      spec.z0 = coef.at("z0").get<double>();
      spec.z1 = coef.at("z1").get<double>();
      try {
        validate(arm_model(spec, Arm::Control));
        validate(arm_model(spec, Arm::Treated));
      } catch (const error& e) {
        throw validation_error(e.what());
      }
      fit.treatment = spec;
    } else if (variant >= 2) {
      throw validation_error("fit JSON: variant " + std::to_string(variant) +
                             " needs treatment_coefficients");
    }

    fit.loglik = doc.at("loglik").get<double>();
    fit.n_params = doc.at("n_params").get<int>();
    if (fit.n_params < 0) throw validation_error("fit JSON: n_params must be >= 0");
    fit.aic = doc.at("aic").get<double>();
    fit.converged = doc.at("converged").get<bool>();
    fit.iterations = doc.at("iterations").get<int>();
    fit.seed = doc.at("seed").get<std::uint64_t>();
    fit.boundary_flag = doc.at("boundary_flag").get<bool>();
    return fit;
  });
}

FitResult read_fit_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw format_error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return fit_from_json(buf.str());
}

void write_fit_json_file(const std::string& path, const FitResult& fit) {
  std::ofstream out(path);
  if (!out) throw format_error("cannot open '" + path + "' for writing");
  out << fit_to_json(fit);
}

TrialSpec trial_spec_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw format_error(std::string("trial spec does not parse: ") + e.what());
  }
  return reading("trial spec", [&] {
    if (!doc.is_object()) throw format_error("trial spec: top level must be an object");
    TrialSpec spec;
    auto read_count = [&](const char* key) -> std::size_t {
      const long long value = doc.at(key).get<long long>();
      if (value < 0)
        throw validation_error(std::string("trial spec: ") + key + " must be >= 0");
      return static_cast<std::size_t>(value);
    };
    if (doc.contains("n_control")) spec.n_control = read_count("n_control");
    if (doc.contains("n_treated")) spec.n_treated = read_count("n_treated");
    if (doc.contains("control_model"))
      spec.control_model = mixture_from_json(doc.at("control_model").at("components"));
    if (doc.contains("treated_model"))
      spec.treated_model = mixture_from_json(doc.at("treated_model").at("components"));
    if (doc.contains("censoring")) spec.censoring = censoring_from_json(doc.at("censoring"));
    if (doc.contains("seed")) spec.seed = doc.at("seed").get<std::uint64_t>();
    validate(spec);
    return spec;
  });
}

TrialSpec read_trial_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw format_error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return trial_spec_from_json(buf.str());
}

}  // namespace survmix
