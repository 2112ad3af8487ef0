#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "survmix/curves.hpp"
#include "survmix/error.hpp"
#include "survmix/random.hpp"
#include "survmix/simulate.hpp"
#include "testdata.hpp"

using namespace survmix;

namespace {

const CurvePoints* find_curve(const std::vector<CurvePoints>& curves,
                              const std::string& label) {
  for (const CurvePoints& c : curves)
    if (c.label == label) return &c;
  return nullptr;
}

void check_curve_invariants(const CurvePoints& c) {
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    CHECK(c.points[i].second >= 0.0);
    CHECK(c.points[i].second <= 1.0);
    if (i > 0) {
      CHECK(c.points[i].first > c.points[i - 1].first);
      CHECK(c.points[i].second <= c.points[i - 1].second);
    }
  }
}

MixtureModel two_weibulls() {
  return make_mixture({{0.55, weibull(1.2, 0.0926)},
                       {0.45, weibull(2.5, 0.000176)}});
}

}  // namespace

TEST_CASE("km_estimator closed forms") {
  // Three events, no censoring: the survival drops 2/3, 1/3, 0.
  CurvePoints km = km_estimator(testutil::make_data({1, 2, 3}, {1, 1, 1}));
  REQUIRE(km.points.size() == 3);
  CHECK(km.kind == CurvePoints::Kind::KaplanMeier);
  CHECK(km.points[0].first == 1.0);
  CHECK(km.points[0].second == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(km.points[1].second == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(km.points[2].second == doctest::Approx(0.0).epsilon(1e-12));

  // One event at t=1 among four subjects: 3/4 and nothing after.
  CurvePoints one =
      km_estimator(testutil::make_data({1, 2, 3, 4}, {1, 0, 0, 0}));
  REQUIRE(one.points.size() == 1);
  CHECK(one.points[0].first == 1.0);
  CHECK(one.points[0].second == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("km_estimator risk-set details") {
  // A subject censored at an event time is still at risk there.
  CurvePoints tied =
      km_estimator(testutil::make_data({1, 1, 2}, {1, 0, 1}));
  REQUIRE(tied.points.size() == 2);
  CHECK(tied.points[0].second == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  // Only the event subject remains at t=2.
  CHECK(tied.points[1].second == doctest::Approx(0.0).epsilon(1e-12));

  // Tied events share one step: d=2 out of n=3.
  CurvePoints twin = km_estimator(testutil::make_data({1, 1, 2}, {1, 1, 0}));
  REQUIRE(twin.points.size() == 1);
  CHECK(twin.points[0].second == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // Censoring after the last event adds no step and no drop.
  CurvePoints base = km_estimator(testutil::make_data({1, 2, 3}, {1, 1, 0}));
  CurvePoints extended =
      km_estimator(testutil::make_data({1, 2, 3, 9, 11}, {1, 1, 0, 0, 0}));
  REQUIRE(extended.points.size() == base.points.size());
  CHECK(extended.points.back().first == base.points.back().first);
  // (The values differ — the early risk sets are larger — but the curve
  // still ends at its last event and stays flat afterwards.)
}

TEST_CASE("km_estimator needs at least one event") {
  CHECK_THROWS_AS(km_estimator(testutil::make_data({1, 2, 3}, {0, 0, 0})),
                  degeneracy_error);
  CHECK_THROWS_AS(km_estimator(Dataset{}), fit_error);
}

TEST_CASE("km_estimator tracks the generating model on simulated data") {
  MixtureModel model = two_weibulls();
  RandomStream rng(41);
  Dataset data = simulate_arm(model, 2000, no_censoring(), rng);
  CurvePoints km = km_estimator(data);
  check_curve_invariants(km);
  double sup = 0.0;
  for (const auto& [t, s] : km.points)
    sup = std::max(sup, std::abs(s - mix_survival(model, t)));
  CHECK(sup < 0.05);
}

TEST_CASE("parse_grid and grid_times") {
  GridSpec g = parse_grid("0:60:0.5");
  CHECK(g.start == 0.0);
  CHECK(g.stop == 60.0);
  CHECK(g.step == 0.5);
  std::vector<double> t = grid_times(g);
  REQUIRE(t.size() == 121);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == 60.0);

  // A stop off the lattice is simply not reached.
  std::vector<double> coarse = grid_times(parse_grid("0:1:0.3"));
  REQUIRE(coarse.size() == 4);
  CHECK(coarse.back() == doctest::Approx(0.9).epsilon(1e-12));

  // Single-point grid.
  CHECK(grid_times(parse_grid("5:5:1")).size() == 1);

  CHECK_THROWS_AS(parse_grid("5:1:1"), usage_error);
  CHECK_THROWS_AS(parse_grid("0:10:0"), usage_error);
  CHECK_THROWS_AS(parse_grid("0:10:-1"), usage_error);
  CHECK_THROWS_AS(parse_grid("-1:10:1"), usage_error);
  CHECK_THROWS_AS(parse_grid("a:10:1"), usage_error);
  CHECK_THROWS_AS(parse_grid("0:10"), usage_error);
  CHECK_THROWS_AS(parse_grid("0:10:1:2"), usage_error);
  CHECK_THROWS_AS(parse_grid(""), usage_error);
}

TEST_CASE("emit_curves on pooled data and fit") {
  Dataset data = testutil::make_data({2, 4, 6, 9}, {1, 1, 0, 1});
  FitResult fit;
  fit.variant = Variant::V1;
  fit.model = two_weibulls();

  std::vector<CurvePoints> curves = emit_curves(data, fit, parse_grid("0:40:5"));
  REQUIRE(curves.size() == 4);
  const CurvePoints* km = find_curve(curves, "km");
  const CurvePoints* model = find_curve(curves, "model");
  const CurvePoints* c1 = find_curve(curves, "component1");
  const CurvePoints* c2 = find_curve(curves, "component2");
  REQUIRE(km);
  REQUIRE(model);
  REQUIRE(c1);
  REQUIRE(c2);
  CHECK(model->kind == CurvePoints::Kind::ModelCurve);
  CHECK(c1->kind == CurvePoints::Kind::ComponentCurve);

  // Every model-based series starts at survival 1 at t=0.
  CHECK(model->points[0] == std::pair{0.0, 1.0});
  CHECK(c1->points[0] == std::pair{0.0, 1.0});
  CHECK(c2->points[0] == std::pair{0.0, 1.0});

  // Values are the mixture and plain component survival functions.
  for (std::size_t i = 0; i < model->points.size(); ++i) {
    const double t = model->points[i].first;
    CHECK(model->points[i].second ==
          doctest::Approx(mix_survival(fit.model, t)).epsilon(1e-14));
    CHECK(c1->points[i].second ==
          doctest::Approx(survival(fit.model.components[0].spec, t))
              .epsilon(1e-14));
  }
  for (const CurvePoints& c : curves) check_curve_invariants(c);
}

TEST_CASE("emit_curves single-component fit duplicates into the model curve") {
  Dataset data = testutil::make_data({2, 4, 6}, {1, 1, 1});
  FitResult fit;
  fit.variant = Variant::V0;
  fit.model = make_mixture({{1.0, exponential(0.1)}});
  std::vector<CurvePoints> curves = emit_curves(data, fit, parse_grid("0:30:10"));
  const CurvePoints* model = find_curve(curves, "model");
  const CurvePoints* c1 = find_curve(curves, "component1");
  REQUIRE(model);
  REQUIRE(c1);
  REQUIRE(curves.size() == 3);
  for (std::size_t i = 0; i < model->points.size(); ++i)
    CHECK(model->points[i].second ==
          doctest::Approx(c1->points[i].second).epsilon(1e-15));
}

TEST_CASE("emit_curves splits by arm") {
  Dataset data = testutil::make_data({2, 4, 6, 9, 3, 5}, {1, 1, 0, 1, 1, 1},
                                     {0, 0, 0, 1, 1, 1});

  SUBCASE("pooled fit: per-arm KM, one shared model set") {
    FitResult fit;
    fit.variant = Variant::V1;
    fit.model = two_weibulls();
    std::vector<CurvePoints> curves =
        emit_curves(data, fit, parse_grid("0:40:10"));
    REQUIRE(curves.size() == 5);
    CHECK(find_curve(curves, "km_control"));
    CHECK(find_curve(curves, "km_treated"));
    CHECK(find_curve(curves, "model"));
    CHECK(find_curve(curves, "component2"));
    CHECK_FALSE(find_curve(curves, "model_control"));
  }

  SUBCASE("treatment fit: arm-specific model sets") {
    TreatmentModelSpec spec;
    spec.variant = Variant::V4;
    spec.family[0] = spec.family[1] = Family::Weibull;
    spec.shape[0] = 1.2;
    spec.shape[1] = 2.5;
    spec.loc0[0] = std::log(0.0926);
    spec.loc0[1] = std::log(0.000176);
    spec.loc1[0] = -0.2;
    spec.loc1[1] = -0.3;
    spec.z0 = 0.2;
    spec.z1 = -0.4;

    FitResult fit;
    fit.variant = Variant::V4;
    fit.treatment = spec;
    fit.model = arm_model(spec, Arm::Control);

    std::vector<CurvePoints> curves =
        emit_curves(data, fit, parse_grid("0:40:10"));
    REQUIRE(curves.size() == 8);
    const CurvePoints* mc = find_curve(curves, "model_control");
    const CurvePoints* mt = find_curve(curves, "model_treated");
    REQUIRE(mc);
    REQUIRE(mt);
    CHECK(find_curve(curves, "component1_control"));
    CHECK(find_curve(curves, "component2_treated"));

    MixtureModel treated = arm_model(spec, Arm::Treated);
    CHECK(mt->points[1].second ==
          doctest::Approx(mix_survival(treated, 10.0)).epsilon(1e-14));
    // The arms genuinely differ under this spec.
    CHECK(mt->points[1].second != mc->points[1].second);
    for (const CurvePoints& c : curves) check_curve_invariants(c);
  }
}

TEST_CASE("write_curves_csv layout") {
  CurvePoints c;
  c.label = "model";
  c.kind = CurvePoints::Kind::ModelCurve;
  c.points = {{0.0, 1.0}, {2.5, 0.125}};
  std::ostringstream out;
  write_curves_csv(out, {c});
  CHECK(out.str() == "series,time,survival\nmodel,0,1\nmodel,2.5,0.125\n");
}
