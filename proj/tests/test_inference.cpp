#include <cmath>
#include <vector>

#include "doctest.h"
#include "survmix/cutpoint.hpp"
#include "survmix/error.hpp"
#include "survmix/fit.hpp"
#include "survmix/logrank.hpp"
#include "survmix/model_select.hpp"
#include "survmix/random.hpp"
#include "survmix/special.hpp"
#include "testdata.hpp"

using namespace survmix;
using testutil::make_data;

namespace {

FitResult stub_fit(Variant v, double loglik, int n_params) {
  FitResult r;
  r.variant = v;
  r.loglik = loglik;
  r.n_params = n_params;
  r.aic = -2.0 * loglik + 2.0 * n_params;
  return r;
}

// Chi-square upper tail for df=1, via the normal tail.
double chisq1_sf(double x) { return std::erfc(std::sqrt(0.5 * x)); }

}  // namespace

TEST_CASE("log-rank reproduces the four-subject risk table") {
  // Control events at 1 and 2, treated at 3 and 4. Walking the risk sets by
  // hand: contributions (O-E) of 1/2 and 2/3, variances 1/4 and 2/9, zeros
  // afterwards, giving (7/6)^2 / (17/36) = 49/17.
  const auto d = make_data({1, 2, 3, 4}, {1, 1, 1, 1},
                           {Arm::Control, Arm::Control, Arm::Treated,
                            Arm::Treated});
  const auto r = log_rank(d);
  CHECK(r.statistic == doctest::Approx(49.0 / 17.0).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(chisq1_sf(49.0 / 17.0)).epsilon(1e-9));
  CHECK(r.p_value == doctest::Approx(0.0896).epsilon(2e-3));
  CHECK(r.observed[0] == 2.0);
  CHECK(r.observed[1] == 2.0);
  CHECK(r.expected[0] == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(r.observed[0] + r.observed[1] ==
        doctest::Approx(r.expected[0] + r.expected[1]).epsilon(1e-9));
  CHECK(r.df == 1);
}

TEST_CASE("log-rank symmetry and invariances") {
  // Identical time/event multisets in both arms: no signal at all.
  const auto same = make_data({1, 3, 5, 1, 3, 5}, {1, 1, 0, 1, 1, 0},
                              {Arm::Control, Arm::Control, Arm::Control,
                               Arm::Treated, Arm::Treated, Arm::Treated});
  const auto r0 = log_rank(same);
  CHECK(r0.statistic == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r0.p_value == doctest::Approx(1.0).epsilon(1e-12));

  RandomStream rng(81);
  Dataset d;
  for (int i = 0; i < 60; ++i) {
    const Arm arm = rng.bernoulli(0.5) ? Arm::Treated : Arm::Control;
    const double t = rng.exponential(arm == Arm::Treated ? 0.1 : 0.2);
    d.observations.push_back({t, rng.uniform() < 0.8, arm});
  }
  const auto a = log_rank(d);
  // Swapping the group labels flips the signed difference, not the test.
  Dataset flipped = d;
  for (auto& o : flipped.observations) {
    o.arm = *o.arm == Arm::Control ? Arm::Treated : Arm::Control;
  }
  const auto b = log_rank(flipped);
  CHECK(a.statistic == doctest::Approx(b.statistic).epsilon(1e-12));
  CHECK(a.observed[0] - a.expected[0] ==
        doctest::Approx(-(b.observed[0] - b.expected[0])).epsilon(1e-9));
  // A strictly monotone transform of the times changes nothing: the test
  // only reads ranks.
  Dataset squared = d;
  for (auto& o : squared.observations) o.time = o.time * o.time;
  const auto c = log_rank(squared);
  CHECK(a.statistic == c.statistic);
  CHECK(a.variance == c.variance);
}

TEST_CASE("log-rank one-sided risk sets are vacuous, not fatal") {
  // The treated arm leaves the study before any event, so every risk table
  // is one-sided and observed equals expected by construction.
  const auto d = make_data({0.5, 0.5, 1.0, 2.0}, {0, 0, 1, 1},
                           {Arm::Treated, Arm::Treated, Arm::Control,
                            Arm::Control});
  const auto r = log_rank(d);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == 1.0);
  CHECK(r.observed[0] == doctest::Approx(r.expected[0]).epsilon(1e-12));
}

TEST_CASE("log-rank input errors") {
  const auto one_arm = make_data({1, 2, 3}, {1, 1, 1},
                                 {Arm::Control, Arm::Control, Arm::Control});
  CHECK_THROWS_AS((void)log_rank(one_arm), usage_error);

  Dataset unlabeled = make_data({1, 2}, {1, 1}, {Arm::Control, Arm::Treated});
  unlabeled.observations[1].arm.reset();
  CHECK_THROWS_AS((void)log_rank(unlabeled), data_error);

  const auto no_events = make_data({1, 2, 3, 4}, {0, 0, 0, 0},
                                   {Arm::Control, Arm::Control, Arm::Treated,
                                    Arm::Treated});
  CHECK_THROWS_AS((void)log_rank(no_events), degeneracy_error);
}

TEST_CASE("aic arithmetic") {
  CHECK(aic(0.0, 0) == 0.0);
  CHECK(aic(-1221.0, 5) == 2452.0);
  CHECK(aic(-1389.5, 2) == 2783.0);
  CHECK(aic(-100.0, 3) > aic(-100.0, 2));
  CHECK(aic(-101.0, 3) > aic(-100.0, 3));
  CHECK_THROWS_AS((void)aic(-5.0, -1), usage_error);
}

TEST_CASE("rank_models orders by AIC with deterministic ties") {
  std::vector<FitResult> fits;
  fits.push_back(stub_fit(Variant::V0, -1389.5, 2));  // 2783
  fits.push_back(stub_fit(Variant::V1, -1221.0, 5));  // 2452
  fits.push_back(stub_fit(Variant::V4, -1216.0, 8));  // 2448
  auto order = rank_models(fits);
  REQUIRE(order.size() == 3);
  CHECK(order[0] == 2);
  CHECK(order[1] == 1);
  CHECK(order[2] == 0);
  CHECK(fits[order[0]].aic == 2448.0);

  // Equal AIC: fewer parameters first, then input position.
  std::vector<FitResult> tied;
  tied.push_back(stub_fit(Variant::V2, -993.0, 7));
  tied.push_back(stub_fit(Variant::V3, -994.0, 6));  // same AIC, fewer params
  tied.push_back(stub_fit(Variant::V1, -994.0, 6));
  auto t = rank_models(tied);
  CHECK(t[0] == 1);
  CHECK(t[1] == 2);
  CHECK(t[2] == 0);

  CHECK(rank_models({stub_fit(Variant::V1, -1.0, 3)})[0] == 0);
  CHECK_THROWS_AS((void)rank_models({}), usage_error);
}

TEST_CASE("likelihood-ratio test over the variant ladder") {
  const auto v1 = stub_fit(Variant::V1, -1221.0, 5);
  const auto v4 = stub_fit(Variant::V4, -1216.0, 8);
  const auto r = lr_test(v4, v1);
  CHECK(r.statistic == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(r.df == 3);
  // df=3 upper tail in closed form: 2*(1-Phi(sqrt(x))) +
  // sqrt(2x/pi)*exp(-x/2).
  const double x = 10.0;
  const double oracle = std::erfc(std::sqrt(0.5 * x)) +
                        std::sqrt(2.0 * x / M_PI) * std::exp(-0.5 * x);
  CHECK(r.p_value == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(r.p_value == doctest::Approx(0.0186).epsilon(2e-3));

  const auto flat = lr_test(stub_fit(Variant::V2, -50.0, 7),
                            stub_fit(Variant::V1, -50.0, 5));
  CHECK(flat.statistic == 0.0);
  CHECK(flat.p_value == 1.0);

  // A hair of reduced-model advantage is round-off; clamp to zero.
  const auto clamped = lr_test(stub_fit(Variant::V4, -50.0 - 4e-7, 8),
                               stub_fit(Variant::V3, -50.0, 6));
  CHECK(clamped.statistic == 0.0);
}

TEST_CASE("likelihood-ratio test pairing guards") {
  const auto v0 = stub_fit(Variant::V0, -1300.0, 2);
  const auto v1 = stub_fit(Variant::V1, -1221.0, 5);
  const auto v2 = stub_fit(Variant::V2, -1218.0, 7);
  const auto v3 = stub_fit(Variant::V3, -1219.0, 6);
  const auto v4 = stub_fit(Variant::V4, -1216.0, 8);
  CHECK_THROWS_AS((void)lr_test(v4, v0), usage_error);
  CHECK_THROWS_AS((void)lr_test(v1, v0), usage_error);
  CHECK_THROWS_AS((void)lr_test(v2, v3), usage_error);
  CHECK_THROWS_AS((void)lr_test(v1, v4), usage_error);
  CHECK(lr_test(v2, v1).df == 2);
  CHECK(lr_test(v3, v1).df == 1);
  CHECK(lr_test(v4, v2).df == 1);
  CHECK(lr_test(v4, v3).df == 2);

  // Reduced beating full by more than round-off is an optimizer failure.
  CHECK_THROWS_AS((void)lr_test(stub_fit(Variant::V4, -60.0, 8),
                                stub_fit(Variant::V1, -59.0, 5)),
                  fit_error);
}

TEST_CASE("cut point splits symmetric lognormals at the geometric middle") {
  const auto m = make_mixture(
      {{0.5, log_normal(0.0, 0.6)}, {0.5, log_normal(2.0, 0.6)}});
  CHECK(cut_point(m) == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
}

TEST_CASE("cut point matches the equal-shape Weibull closed form") {
  RandomStream rng(91);
  int checked = 0;
  while (checked < 30) {
    const double k = std::exp(rng.uniform(-0.5, 1.0));
    const double lam2 = std::exp(rng.uniform(-5.0, -1.0));
    const double lam1 = lam2 * std::exp(rng.uniform(0.7, 2.5));
    const double pi1 = rng.uniform(0.25, 0.75);
    const auto m = make_mixture(
        {{pi1, weibull(k, lam1)}, {1.0 - pi1, weibull(k, lam2)}});
    double t_closed;
    try {
      t_closed = cut_point(m);
    } catch (const no_unique_cut_point&) {
      continue;  // crossing fell outside the median bracket; redraw
    }
    const double oracle = std::pow(
        std::log(pi1 * lam1 / ((1.0 - pi1) * lam2)) / (lam1 - lam2),
        1.0 / k);
    CHECK(t_closed == doctest::Approx(oracle).epsilon(1e-8));
    // At the cut the posterior for either component is exactly one half.
    const auto z = e_step(m, make_data({t_closed}, {1}));
    CHECK(z[0] == doctest::Approx(0.5).epsilon(1e-6));
    ++checked;
  }
}

TEST_CASE("cut point posterior is one half for mixed families too") {
  RandomStream rng(92);
  int checked = 0;
  while (checked < 30) {
    MixtureModel m;
    const double pi1 = rng.uniform(0.2, 0.8);
    const double med1 = rng.uniform(3.0, 9.0);
    const double med2 = med1 * rng.uniform(2.5, 6.0);
    const double k1 = std::exp(rng.uniform(-0.3, 0.9));
    const double k2 = std::exp(rng.uniform(-0.3, 0.9));
    m = make_mixture({{pi1, weibull(k1, std::log(2.0) /
                                            std::pow(med1, k1))},
                      {1.0 - pi1,
                       log_normal(std::log(med2), 0.4 + 0.5 * k2)}});
    double cut;
    try {
      cut = cut_point(m);
    } catch (const no_unique_cut_point&) {
      continue;
    }
    const auto z = e_step(m, make_data({cut}, {1}));
    CHECK(z[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(cut >= median(m.components[0].spec));
    CHECK(cut <= median(m.components[1].spec));
    ++checked;
  }
}

TEST_CASE("raw-density cut point ignores the weights") {
  // Exponential pair: raw densities cross at ln(l1/l2)/(l1-l2) no matter the
  // weights; the weighted cut moves with them.
  const double l1 = 1.0, l2 = 0.25;
  const auto m =
      make_mixture({{0.3, exponential(l1)}, {0.7, exponential(l2)}});
  const double raw = cut_point(m, /*weighted=*/false);
  CHECK(raw == doctest::Approx(std::log(l1 / l2) / (l1 - l2)).epsilon(1e-9));
  const double weighted = cut_point(m);
  CHECK(weighted ==
        doctest::Approx(std::log(0.3 * l1 / (0.7 * l2)) / (l1 - l2))
            .epsilon(1e-9));
  CHECK(raw != weighted);
  // Equal weights collapse the two readings onto each other.
  const auto even =
      make_mixture({{0.5, exponential(l1)}, {0.5, exponential(l2)}});
  CHECK(cut_point(even, false) == doctest::Approx(cut_point(even))
                                      .epsilon(1e-9));
}

TEST_CASE("cut point failure modes") {
  const auto same =
      make_mixture({{0.4, weibull(1.5, 0.1)}, {0.6, weibull(1.5, 0.1)}});
  CHECK_THROWS_AS((void)cut_point(same), no_unique_cut_point);

  // Equal medians but different shapes: the bracket is empty.
  const auto pinched = make_mixture(
      {{0.5, weibull(1.0, std::log(2.0) / 10.0)},
       {0.5, weibull(3.0, std::log(2.0) / 1000.0)}});
  CHECK_THROWS_AS((void)cut_point(pinched), no_unique_cut_point);

  // Heavily lopsided weights push the crossing past the slow median.
  const auto lopsided =
      make_mixture({{0.95, exponential(1.0)}, {0.05, exponential(0.9)}});
  CHECK_THROWS_AS((void)cut_point(lopsided), no_unique_cut_point);

  const auto single = make_mixture({{1.0, exponential(1.0)}});
  CHECK_THROWS_AS((void)cut_point(single), usage_error);
}

TEST_CASE("classify thresholds times at the cut point") {
  const auto m =
      make_mixture({{0.5, exponential(1.0)}, {0.5, exponential(0.25)}});
  const double cut = cut_point(m);

  const auto below = classify(make_data({cut * 0.1, cut * 0.5, cut * 0.9},
                                        {1, 1, 0}),
                              m);
  CHECK(below.short_fraction == 1.0);
  for (auto s : below.labels) CHECK(s == Subpop::Short);

  // Exactly at the threshold counts as long-term.
  const auto edge = classify(make_data({cut, cut * 2.0}, {1, 1}), m);
  CHECK(edge.labels[0] == Subpop::Long);
  CHECK(edge.labels[1] == Subpop::Long);
  CHECK(edge.short_fraction == 0.0);
  CHECK(edge.cut_point == cut);
}

TEST_CASE("classified fraction tracks the mixture mass below the cut") {
  const auto m = make_mixture(
      {{0.55, weibull(1.3, std::log(2.0) / std::pow(7.0, 1.3))},
       {0.45, weibull(2.0, std::log(2.0) / std::pow(27.0, 2.0))}});
  const double cut = cut_point(m);
  RandomStream rng(93);
  Dataset d;
  for (int i = 0; i < 4000; ++i) {
    d.observations.push_back({mix_sample_one(m, rng), true, std::nullopt});
  }
  const auto r = classify(d, m);
  CHECK(r.short_fraction ==
        doctest::Approx(1.0 - mix_survival(m, cut)).epsilon(0.05));
}

TEST_CASE("subpopulation comparison with a shared mixture") {
  // One mixture for both arms, treated times uniformly stretched: the
  // stretch shows up in both strata.
  const auto m =
      make_mixture({{0.5, exponential(0.5)}, {0.5, exponential(0.02)}});
  FitResult fit;
  fit.variant = Variant::V1;
  fit.model = m;

  RandomStream rng(94);
  Dataset d;
  for (int i = 0; i < 400; ++i) {
    const Arm arm = i % 2 ? Arm::Treated : Arm::Control;
    double t = mix_sample_one(m, rng);
    if (arm == Arm::Treated) t *= 1.8;
    d.observations.push_back({t, true, arm});
  }
  const auto sc = subpop_treatment_comparison(d, fit);
  CHECK(sc.cut_points[0] == cut_point(m));
  CHECK(sc.cut_points[1] == sc.cut_points[0]);
  REQUIRE(sc.labels.size() == d.n());
  for (std::size_t i = 0; i < d.n(); ++i) {
    const bool is_short = d.observations[i].time < sc.cut_points[0];
    CHECK((sc.labels[i] == Subpop::Short) == is_short);
  }
  REQUIRE(sc.short_test.has_value());
  REQUIRE(sc.long_test.has_value());
  CHECK(sc.warnings.empty());
  CHECK(sc.short_test->statistic > 0.0);
}

TEST_CASE("subpopulation comparison follows each arm's own mixture") {
  TreatmentModelSpec spec;
  spec.variant = Variant::V4;
  spec.family[0] = Family::Exponential;
  spec.family[1] = Family::Exponential;
  spec.loc0[0] = std::log(1.0);
  spec.loc1[0] = -0.5;  // treated arm's fast component slows down
  spec.loc0[1] = std::log(0.05);
  spec.loc1[1] = 0.0;
  spec.z0 = 0.0;
  spec.z1 = 0.4;
  FitResult fit;
  fit.variant = Variant::V4;
  fit.treatment = spec;
  fit.model = arm_model(spec, Arm::Control);

  const auto d = make_data({2.0, 2.0}, {1, 1}, {Arm::Control, Arm::Treated});
  const auto sc = subpop_treatment_comparison(d, fit);
  CHECK(sc.cut_points[0] == cut_point(arm_model(spec, Arm::Control)));
  CHECK(sc.cut_points[1] == cut_point(arm_model(spec, Arm::Treated)));
  CHECK(sc.cut_points[0] != sc.cut_points[1]);
  // Same observed time, but the label depends on the subject's arm once the
  // cut points straddle it.
  if (sc.cut_points[0] < 2.0 && sc.cut_points[1] > 2.0) {
    CHECK(sc.labels[0] == Subpop::Long);
    CHECK(sc.labels[1] == Subpop::Short);
  }
}

TEST_CASE("subpopulation comparison skips hollow strata with a warning") {
  const auto m =
      make_mixture({{0.5, exponential(1.0)}, {0.5, exponential(0.05)}});
  FitResult fit;
  fit.variant = Variant::V1;
  fit.model = m;
  const double cut = cut_point(m);

  // All treated subjects are short-term, so the long stratum is one-sided.
  const auto d = make_data(
      {cut * 0.3, cut * 2.0, cut * 3.0, cut * 0.2, cut * 0.5},
      {1, 1, 1, 1, 1},
      {Arm::Control, Arm::Control, Arm::Control, Arm::Treated, Arm::Treated});
  const auto sc = subpop_treatment_comparison(d, fit);
  CHECK(sc.short_test.has_value());
  CHECK_FALSE(sc.long_test.has_value());
  REQUIRE(sc.warnings.size() == 1);
  CHECK(sc.warnings[0].find("long") != std::string::npos);

  Dataset no_arms = d;
  no_arms.observations[2].arm.reset();
  CHECK_THROWS_AS((void)subpop_treatment_comparison(no_arms, fit), data_error);
  Dataset solo = filter(d, [&](std::size_t i) {
    return *d.observations[i].arm == Arm::Control;
  });
  CHECK_THROWS_AS((void)subpop_treatment_comparison(solo, fit), usage_error);
}

TEST_CASE("stratum tests stay calibrated under no treatment effect") {
  // True mixture known, no arm effect: within-stratum log-rank p-values
  // should reject rarely. 20 seeds keeps this a smoke test; the heavy
  // calibration runs live in the acceptance suite.
  const auto m =
      make_mixture({{0.5, exponential(0.8)}, {0.5, exponential(0.04)}});
  FitResult fit;
  fit.variant = Variant::V1;
  fit.model = m;
  int rejects_short = 0, rejects_long = 0, ran = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomStream rng(seed, 95, 0);
    Dataset d;
    for (int i = 0; i < 240; ++i) {
      d.observations.push_back({mix_sample_one(m, rng), true,
                                i % 2 ? Arm::Treated : Arm::Control});
    }
    const auto sc = subpop_treatment_comparison(d, fit);
    if (!sc.short_test || !sc.long_test) continue;
    ++ran;
    if (sc.short_test->p_value < 0.05) ++rejects_short;
    if (sc.long_test->p_value < 0.05) ++rejects_long;
  }
  CHECK(ran >= 18);
  CHECK(rejects_short <= 4);
  CHECK(rejects_long <= 4);
}
