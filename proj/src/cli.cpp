#include "survmix/cli.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "survmix/csv.hpp"
#include "survmix/curves.hpp"
#include "survmix/cutpoint.hpp"
#include "survmix/error.hpp"
#include "survmix/fit.hpp"
#include "survmix/fit_json.hpp"
#include "survmix/logrank.hpp"
#include "survmix/model_select.hpp"
#include "survmix/silverman.hpp"
#include "survmix/simulate.hpp"

namespace survmix {

namespace {

// Machine output goes to --out when given, stdout otherwise; diagnostics
// always go to stderr.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw format_error("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

struct FitArgs {
  std::string data_path;
  std::string dist;
  std::string dist2;
  int mixture = 1;
  int variant = 0;
  FitOptions opts;
  std::string out_path;
};

struct ModalityArgs {
  std::string data_path;
  int k_max = 3;
  SilvermanOptions opts;
  bool events_only = false;
  bool by_arm = false;
  std::string out_path;
};

struct ClassifyArgs {
  std::string data_path;
  std::string fit_path;
  bool raw = false;
  std::string out_path;
};

struct LogrankArgs {
  std::string data_path;
  std::string fit_path;  // empty = pooled test
  std::string out_path;
};

struct SimulateArgs {
  std::string spec_path;
  bool truth = false;
  std::string out_path;
};

struct CurvesArgs {
  std::string data_path;
  std::string fit_path;
  std::string grid;
  std::string out_path;
};

int run_fit(const FitArgs& args, bool have_variant, bool have_mixture) {
  Variant variant = Variant::V0;
  if (have_variant) {
    variant = static_cast<Variant>(args.variant);
    const bool wants_mixture = variant != Variant::V0;
    if (have_mixture && wants_mixture != (args.mixture == 2))
      throw usage_error("--mixture and --variant disagree");
  } else if (have_mixture && args.mixture == 2) {
    variant = Variant::V1;
  }
  if (!args.dist2.empty() && variant == Variant::V0)
    throw usage_error("--dist2 needs a two-component model");

  const Family first = family_from_name(args.dist);
  const Family second =
      args.dist2.empty() ? first : family_from_name(args.dist2);

  const Dataset data = read_csv_file(args.data_path);
  const FitResult fit =
      fit_treatment_model(data, variant, {first, second}, args.opts);
  if (!fit.converged)
    std::cerr << "warning: fit did not converge within "
              << args.opts.max_iter << " iterations\n";

  OutputTarget out(args.out_path);
  out.stream() << fit_to_json(fit);
  return 0;
}

int run_modality(const ModalityArgs& args) {
  const Dataset data = read_csv_file(args.data_path);

  struct Group {
    std::string name;
    std::vector<double> times;
  };
  auto collect = [&](std::optional<Arm> arm) {
    std::vector<double> times;
    for (const Observation& obs : data.observations) {
      if (arm && obs.arm != arm) continue;
      if (args.events_only && !obs.event) continue;
      times.push_back(obs.time);
    }
    return times;
  };
  std::vector<Group> groups;
  if (args.by_arm) {
    if (!data.has_arms())
      throw usage_error("--by-arm needs an arm column in the data");
    groups.push_back({"control", collect(Arm::Control)});
    groups.push_back({"treated", collect(Arm::Treated)});
  } else {
    groups.push_back({"all", collect(std::nullopt)});
  }

  OutputTarget target(args.out_path);
  std::ostream& out = target.stream();
  out << "sample,k,h_crit,n_boot,n_exceed,p_value,first_nonsignificant";
  if (args.opts.calibrate)
    out << ",lambda,n_exceed_calibrated,p_calibrated";
  out << "\n";
  for (const Group& group : groups) {
    const ModalityScanResult scan =
        modality_scan(group.times, args.k_max, args.opts);
    for (const SilvermanResult& test : scan.tests) {
      const bool first = scan.first_nonsignificant &&
                         *scan.first_nonsignificant == test.k;
      out << group.name << ',' << test.k << ',' << format_number(test.h_crit)
          << ',' << test.n_boot << ',' << test.n_exceed << ','
          << format_number(test.p_value) << ',' << (first ? 1 : 0);
      if (args.opts.calibrate) {
        if (test.calibrated)
          out << ',' << format_number(*test.lambda) << ','
              << *test.n_exceed_calibrated << ','
              << format_number(*test.p_calibrated);
        else
          out << ",,,";  // calibration only applies to k = 1
      }
      out << "\n";
    }
  }
  return 0;
}

int run_compare(const std::vector<std::string>& files,
                const std::string& out_path) {
  std::vector<FitResult> fits;
  fits.reserve(files.size());
  for (const std::string& path : files) fits.push_back(read_fit_json_file(path));

  nlohmann::ordered_json doc;
  doc["ranking"] = nlohmann::ordered_json::array();
  for (std::size_t i : rank_models(fits)) {
    doc["ranking"].push_back({{"file", files[i]},
                              {"variant", static_cast<int>(fits[i].variant)},
                              {"loglik", fits[i].loglik},
                              {"n_params", fits[i].n_params},
                              {"aic", fits[i].aic}});
  }
  doc["lr_tests"] = nlohmann::ordered_json::array();
  for (std::size_t full = 0; full < fits.size(); ++full) {
    for (std::size_t reduced = 0; reduced < fits.size(); ++reduced) {
      if (full == reduced) continue;
      LrtResult lrt;
      try {
        lrt = lr_test(fits[full], fits[reduced]);
      } catch (const usage_error&) {
        continue;  // pair is not nested
      }
      doc["lr_tests"].push_back({{"full", files[full]},
                                 {"reduced", files[reduced]},
                                 {"statistic", lrt.statistic},
                                 {"df", lrt.df},
                                 {"p_value", lrt.p_value}});
    }
  }

  OutputTarget out(out_path);
  out.stream() << doc.dump(2) << "\n";
  return 0;
}

int run_classify(const ClassifyArgs& args) {
  const Dataset data = read_csv_file(args.data_path);
  const FitResult fit = read_fit_json_file(args.fit_path);
  const bool weighted = !args.raw;

  // Arm-dependent mixtures give each arm its own cut point.
  std::vector<double> cuts(data.n());
  if (fit.treatment) {
    if (!data.has_arms())
      throw data_error(
          "classify: the fit is arm-dependent but the data has no arm column");
    const double by_arm[2] = {
        cut_point(arm_model(*fit.treatment, Arm::Control), weighted),
        cut_point(arm_model(*fit.treatment, Arm::Treated), weighted)};
    for (std::size_t i = 0; i < data.n(); ++i)
      cuts[i] = by_arm[data.observations[i].arm == Arm::Treated ? 1 : 0];
  } else {
    const double cut = cut_point(fit.model, weighted);
    for (double& c : cuts) c = cut;
  }

  OutputTarget target(args.out_path);
  std::ostream& out = target.stream();
  const bool arm = data.has_arms();
  out << "time,event";
  if (arm) out << ",arm";
  out << ",subpop,cut_point\n";
  for (std::size_t i = 0; i < data.n(); ++i) {
    const Observation& obs = data.observations[i];
    out << format_number(obs.time) << ',' << (obs.event ? 1 : 0);
    if (arm) out << ',' << (obs.arm == Arm::Treated ? 1 : 0);
    out << ',' << (obs.time < cuts[i] ? "short" : "long") << ','
        << format_number(cuts[i]) << "\n";
  }
  return 0;
}

void write_logrank_row(std::ostream& out, const std::string& stratum,
                       const LogRankResult& r) {
  out << stratum << ',' << format_number(r.observed[0]) << ','
      << format_number(r.observed[1]) << ',' << format_number(r.expected[0])
      << ',' << format_number(r.expected[1]) << ','
      << format_number(r.variance) << ',' << format_number(r.statistic) << ','
      << r.df << ',' << format_number(r.p_value) << "\n";
}

int run_logrank(const LogrankArgs& args) {
  const Dataset data = read_csv_file(args.data_path);
  OutputTarget target(args.out_path);
  std::ostream& out = target.stream();
  out << "stratum,observed_control,observed_treated,expected_control,"
         "expected_treated,variance,statistic,df,p_value\n";
  if (args.fit_path.empty()) {
    write_logrank_row(out, "pooled", log_rank(data));
    return 0;
  }
  const FitResult fit = read_fit_json_file(args.fit_path);
  const SubpopComparison comp = subpop_treatment_comparison(data, fit);
  for (const std::string& warning : comp.warnings)
    std::cerr << "warning: " << warning << "\n";
  if (comp.short_test) write_logrank_row(out, "short", *comp.short_test);
  if (comp.long_test) write_logrank_row(out, "long", *comp.long_test);
  return 0;
}

int run_simulate(const SimulateArgs& args) {
  const TrialSpec spec = read_trial_spec_file(args.spec_path);
  const Dataset data = simulate_trial(spec);
  OutputTarget out(args.out_path);
  write_csv(out.stream(), data, args.truth);
  return 0;
}

int run_curves(const CurvesArgs& args) {
  const Dataset data = read_csv_file(args.data_path);
  const FitResult fit = read_fit_json_file(args.fit_path);
  const GridSpec grid = parse_grid(args.grid);
  OutputTarget out(args.out_path);
  write_curves_csv(out.stream(), emit_curves(data, fit, grid));
  return 0;
}

void add_out_option(CLI::App* cmd, std::string& path, const char* what) {
  cmd->add_option("--out", path, std::string("write ") + what +
                                     " to this file instead of stdout");
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{
      "Parametric mixture survival modeling for right-censored trial data"};
  app.name("survmix");
  app.require_subcommand(1);

  FitArgs fit_args;
  CLI::App* fit_cmd = app.add_subcommand(
      "fit", "fit a parametric survival model and write it as JSON");
  fit_cmd->add_option("--data", fit_args.data_path, "input CSV (time,event[,arm])")
      ->required();
  fit_cmd
      ->add_option("--dist", fit_args.dist,
                   "family: exponential, weibull, loglogistic, lognormal")
      ->required();
  fit_cmd->add_option("--mixture", fit_args.mixture,
                      "number of mixture components (1 or 2)")
      ->check(CLI::Range(1, 2));
  fit_cmd->add_option("--variant", fit_args.variant,
                      "model variant: 0 single, 1 mixture, 2 treatment scales, "
                      "3 treatment mixing, 4 both")
      ->check(CLI::Range(0, 4));
  fit_cmd->add_option("--dist2", fit_args.dist2,
                      "family of the second component (defaults to --dist)");
  fit_cmd->add_option("--tol", fit_args.opts.tol, "EM convergence tolerance");
  fit_cmd->add_option("--max-iter", fit_args.opts.max_iter, "EM iteration cap");
  fit_cmd->add_option("--starts", fit_args.opts.n_starts, "number of EM starts");
  fit_cmd->add_option("--seed", fit_args.opts.seed, "seed for the random starts");
  fit_cmd->add_option("--threads", fit_args.opts.threads,
                      "worker threads (output is thread-count invariant)");
  add_out_option(fit_cmd, fit_args.out_path, "the fit JSON");

  ModalityArgs mod_args;
  CLI::App* mod_cmd = app.add_subcommand(
      "modality", "multimodality tests of the follow-up time distribution");
  mod_cmd->add_option("--data", mod_args.data_path, "input CSV (time,event[,arm])")
      ->required();
  mod_cmd->add_option("--k-max", mod_args.k_max, "test k = 1..k-max modes")
      ->check(CLI::PositiveNumber);
  mod_cmd->add_option("--boot", mod_args.opts.n_boot, "bootstrap replicates");
  mod_cmd->add_option("--seed", mod_args.opts.seed, "bootstrap seed");
  mod_cmd->add_option("--alpha", mod_args.opts.alpha,
                      "significance level for the scan decision");
  mod_cmd->add_flag("--events-only", mod_args.events_only,
                    "use observed event times only, dropping censored rows");
  mod_cmd->add_flag("--by-arm", mod_args.by_arm, "test each treatment arm separately");
  mod_cmd->add_flag("--calibrate", mod_args.opts.calibrate,
                    "recalibrated k = 1 test at --alpha, reported alongside");
  mod_cmd->add_option("--threads", mod_args.opts.threads,
                      "worker threads (output is thread-count invariant)");
  add_out_option(mod_cmd, mod_args.out_path, "the p-value table");

  std::vector<std::string> compare_files;
  std::string compare_out;
  CLI::App* cmp_cmd = app.add_subcommand(
      "compare", "rank fit files by AIC and run the nested likelihood-ratio tests");
  cmp_cmd->add_option("fits", compare_files, "two or more fit JSON files")
      ->expected(-2);
  add_out_option(cmp_cmd, compare_out, "the comparison JSON");

  ClassifyArgs cls_args;
  CLI::App* cls_cmd = app.add_subcommand(
      "classify", "label subjects short/long against a fitted mixture's cut point");
  cls_cmd->add_option("--data", cls_args.data_path, "input CSV (time,event[,arm])")
      ->required();
  cls_cmd->add_option("--fit", cls_args.fit_path, "fit JSON from `survmix fit`")
      ->required();
  cls_cmd->add_flag("--raw", cls_args.raw,
                    "intersect raw component densities, ignoring the weights");
  add_out_option(cls_cmd, cls_args.out_path, "the labels CSV");

  LogrankArgs lr_args;
  CLI::App* lr_cmd = app.add_subcommand(
      "logrank", "compare the treatment arms, pooled or per subpopulation");
  lr_cmd->add_option("--data", lr_args.data_path, "input CSV (time,event,arm)")
      ->required();
  lr_cmd->add_option("--stratify-by-fit", lr_args.fit_path,
                     "fit JSON; test within its short/long subpopulations");
  add_out_option(lr_cmd, lr_args.out_path, "the test table");

  SimulateArgs sim_args;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "draw a synthetic trial from a scenario");
  sim_cmd->add_option("--spec", sim_args.spec_path, "trial scenario JSON")
      ->required();
  sim_cmd->add_flag("--truth", sim_args.truth,
                    "include the generating component per subject");
  add_out_option(sim_cmd, sim_args.out_path, "the dataset CSV");

  CurvesArgs crv_args;
  CLI::App* crv_cmd = app.add_subcommand(
      "curves", "Kaplan-Meier and fitted survival curves on a time grid");
  crv_cmd->add_option("--data", crv_args.data_path, "input CSV (time,event[,arm])")
      ->required();
  crv_cmd->add_option("--fit", crv_args.fit_path, "fit JSON from `survmix fit`")
      ->required();
  crv_cmd->add_option("--grid", crv_args.grid, "evaluation grid start:stop:step")
      ->required();
  add_out_option(crv_cmd, crv_args.out_path, "the curves CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse error
    return code == 0 ? 0 : 1;
  }

  try {
    if (fit_cmd->parsed())
      return run_fit(fit_args, fit_cmd->count("--variant") > 0,
                     fit_cmd->count("--mixture") > 0);
    if (mod_cmd->parsed()) return run_modality(mod_args);
    if (cmp_cmd->parsed()) return run_compare(compare_files, compare_out);
    if (cls_cmd->parsed()) return run_classify(cls_args);
    if (lr_cmd->parsed()) return run_logrank(lr_args);
    if (sim_cmd->parsed()) return run_simulate(sim_args);
    if (crv_cmd->parsed()) return run_curves(crv_args);
    return 1;
  } catch (const usage_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const format_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const parameter_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const error& e) {
    // fit_error, numerical_error, and their refinements
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace survmix
