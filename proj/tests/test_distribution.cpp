#include "survmix/distribution.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "quadrature.hpp"
#include "survmix/error.hpp"
#include "survmix/random.hpp"

using namespace survmix;

namespace {

// Random valid spec with median in a sane range, for property checks.
DistributionSpec random_spec(RandomStream& rng) {
  const int which = static_cast<int>(rng.index(4));
  const double med = rng.uniform(2.0, 60.0);
  const double shape = std::exp(rng.uniform(-0.7, 1.0));
  switch (which) {
    case 0: return exponential(std::log(2.0) / med);
    case 1: return weibull(shape, std::log(2.0) / std::pow(med, shape));
    case 2: return log_logistic(shape, std::pow(med, -shape));
    default: return log_normal(std::log(med), rng.uniform(0.3, 1.5));
  }
}

}  // namespace

TEST_CASE("pdf closed-form spot checks") {
  CHECK(pdf(weibull(1.0, 0.3), 2.0) ==
        doctest::Approx(pdf(exponential(0.3), 2.0)).epsilon(1e-14));
  // f(0+) = lambda for the exponential.
  CHECK(pdf(exponential(0.1), 1e-12) == doctest::Approx(0.1).epsilon(1e-10));
  // log t = mu makes the lognormal exponent vanish: f(1) = 1/sqrt(2 pi).
  CHECK(pdf(log_normal(0.0, 1.0), 1.0) ==
        doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-14));
}

TEST_CASE("survival closed-form spot checks") {
  RandomStream rng(7);
  for (int i = 0; i < 8; ++i) {
    CHECK(survival(random_spec(rng), 0.0) == 1.0);
  }
  CHECK(survival(log_logistic(2.0, 1.0), 1.0) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(survival(weibull(2.0, 0.02), 10.0) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  // Same value by quadrature of the density over [10, inf), truncated where
  // the survival function is ~1e-12.
  const auto w = weibull(2.0, 0.02);
  const double upper = quantile(w, 1.0 - 1e-12);
  const double integral = testutil::integrate(
      [&](double t) { return pdf(w, t); }, 10.0, upper, 1e-12);
  CHECK(integral == doctest::Approx(std::exp(-2.0)).epsilon(1e-8));
}

TEST_CASE("log forms agree with plain forms and survive extreme tails") {
  RandomStream rng(11);
  for (int i = 0; i < 20; ++i) {
    const auto spec = random_spec(rng);
    const double t = rng.uniform(0.5, 80.0);
    CHECK(log_pdf(spec, t) ==
          doctest::Approx(std::log(pdf(spec, t))).epsilon(1e-12));
    CHECK(log_survival(spec, t) ==
          doctest::Approx(std::log(survival(spec, t))).epsilon(1e-12));
    CHECK(log_survival(spec, 0.0) == 0.0);
  }
  // Exact closed forms, no underflow.
  CHECK(log_survival(exponential(0.1), 1000.0) == -100.0);
  for (double t : {1.0, 5.0, 50.0}) {
    CHECK(log_pdf(weibull(1.0, 0.3), t) ==
          doctest::Approx(std::log(0.3) - 0.3 * t).epsilon(1e-14));
  }
  // Plain survival underflows to 0 out here; the log form stays finite.
  CHECK(std::isfinite(log_survival(log_normal(0.0, 1.0), 1e30)));
  CHECK(std::isfinite(log_survival(weibull(2.0, 1.0), 1e8)));
  CHECK(std::isfinite(log_pdf(weibull(2.0, 1.0), 1e8)));
}

TEST_CASE("median closed forms and the S(median) = 1/2 identity") {
  CHECK(median(weibull(2.0, std::log(2.0) / 49.0)) ==
        doctest::Approx(7.0).epsilon(1e-12));
  CHECK(median(exponential(0.1)) ==
        doctest::Approx(std::log(2.0) / 0.1).epsilon(1e-12));
  // sigma-independent.
  CHECK(median(log_normal(2.0, 3.0)) ==
        doctest::Approx(std::exp(2.0)).epsilon(1e-12));
  CHECK(median(log_normal(2.0, 0.2)) ==
        doctest::Approx(std::exp(2.0)).epsilon(1e-12));
  RandomStream rng(13);
  for (int i = 0; i < 40; ++i) {
    const auto spec = random_spec(rng);
    CHECK(survival(spec, median(spec)) == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("quantile inverts the survival function") {
  CHECK(quantile(exponential(1.0), 1.0 - std::exp(-2.0)) ==
        doctest::Approx(2.0).epsilon(1e-12));
  // p/(1-p) = 3 at p = 0.75.
  CHECK(quantile(log_logistic(1.0, 1.0), 0.75) ==
        doctest::Approx(3.0).epsilon(1e-12));
  RandomStream rng(17);
  for (int i = 0; i < 20; ++i) {
    const auto spec = random_spec(rng);
    CHECK(quantile(spec, 0.5) == doctest::Approx(median(spec)).epsilon(1e-9));
    double prev = 0.0;
    for (double p = 0.01; p < 0.995; p += 0.07) {
      const double t = quantile(spec, p);
      CHECK(t > prev);
      prev = t;
      CHECK(survival(spec, t) == doctest::Approx(1.0 - p).epsilon(1e-9));
      CHECK(cdf(spec, t) == doctest::Approx(p).epsilon(1e-8));
    }
  }
  const auto spec = exponential(0.2);
  CHECK_THROWS_AS((void)quantile(spec, 0.0), domain_error);
  CHECK_THROWS_AS((void)quantile(spec, 1.0), domain_error);
  CHECK_THROWS_AS((void)quantile(spec, -1.0), domain_error);
}

TEST_CASE("sampling is deterministic and matches the distribution") {
  const auto spec = exponential(0.5);
  RandomStream a(42), b(42);
  CHECK(sample(spec, 0, a).empty());
  RandomStream a2(42), b2(42);
  const auto xs = sample(spec, 1000, a2);
  const auto ys = sample(spec, 1000, b2);
  CHECK(xs == ys);
  RandomStream big(1);
  const auto zs = sample(spec, 50000, big);
  double mean = 0.0;
  for (double z : zs) mean += z;
  mean /= static_cast<double>(zs.size());
  // Law of large numbers against the closed-form mean 1/lambda = 2.
  CHECK(std::fabs(mean - 2.0) < 0.04);
}

TEST_CASE("density integrates to survival differences") {
  RandomStream rng(23);
  for (int i = 0; i < 12; ++i) {
    const auto spec = random_spec(rng);
    const double lo = quantile(spec, 0.05);
    const double hi = quantile(spec, 0.9);
    const double integral = testutil::integrate(
        [&](double t) { return pdf(spec, t); }, lo, hi, 1e-10);
    CHECK(integral ==
          doctest::Approx(survival(spec, lo) - survival(spec, hi))
              .epsilon(1e-6));
  }
  // Total mass 1 (quadrature over the bulk plus closed-form tail bounds).
  for (int i = 0; i < 6; ++i) {
    const auto spec = random_spec(rng);
    const double lo = quantile(spec, 1e-9);
    const double hi = quantile(spec, 1.0 - 1e-9);
    const double integral = testutil::integrate(
        [&](double t) { return pdf(spec, t); }, lo, hi, 1e-10);
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("shape-1 Weibull is the exponential in every operation") {
  const double lam = 0.37;
  const auto w = weibull(1.0, lam);
  const auto e = exponential(lam);
  for (double t : {0.1, 1.0, 4.0, 20.0, 100.0}) {
    CHECK(pdf(w, t) == doctest::Approx(pdf(e, t)).epsilon(1e-12));
    CHECK(survival(w, t) == doctest::Approx(survival(e, t)).epsilon(1e-12));
  }
  CHECK(median(w) == doctest::Approx(median(e)).epsilon(1e-12));
  for (double p : {0.05, 0.3, 0.75, 0.99}) {
    CHECK(quantile(w, p) == doctest::Approx(quantile(e, p)).epsilon(1e-12));
  }
}

TEST_CASE("hazard shapes: flat for exponential, monotone for Weibull") {
  const auto e = exponential(0.4);
  for (double t : {0.5, 2.0, 10.0, 40.0}) {
    CHECK(hazard(e, t) == doctest::Approx(0.4).epsilon(1e-10));
  }
  const auto rising = weibull(2.0, 0.05);
  const auto falling = weibull(0.6, 0.3);
  double prev_r = 0.0, prev_f = 1e300;
  for (double t = 0.5; t < 30.0; t += 1.0) {
    const double hr = hazard(rising, t);
    const double hf = hazard(falling, t);
    CHECK(hr > prev_r);
    CHECK(hf < prev_f);
    prev_r = hr;
    prev_f = hf;
  }
}

TEST_CASE("domain and parameter errors") {
  const auto spec = weibull(0.5, 0.2);
  CHECK_THROWS_AS((void)pdf(spec, 0.0), domain_error);
  CHECK_THROWS_AS((void)pdf(spec, -1.0), domain_error);
  CHECK_THROWS_AS((void)survival(spec, -0.1), domain_error);
  CHECK_THROWS_AS((void)exponential(0.0), parameter_error);
  CHECK_THROWS_AS((void)exponential(-2.0), parameter_error);
  CHECK_THROWS_AS((void)weibull(0.0, 1.0), parameter_error);
  CHECK_THROWS_AS((void)log_logistic(1.0, -1.0), parameter_error);
  CHECK_THROWS_AS((void)log_normal(0.0, 0.0), parameter_error);
  DistributionSpec bad{Family::Weibull, {1.0}};
  CHECK_THROWS_AS((void)pdf(bad, 1.0), parameter_error);
  CHECK_THROWS_AS(
      (void)pdf({Family::Exponential,
                 {std::numeric_limits<double>::quiet_NaN()}},
                1.0),
      parameter_error);
  CHECK(family_from_name("weibull") == Family::Weibull);
  CHECK_THROWS_AS((void)family_from_name("gamma"), usage_error);
}
