#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ratekit/core.hpp"
#include "test_support.hpp"

using ratekit::RatingScale;
using ratekit::logistic;
using ratekit::win_probability;

TEST_CASE("standard scale constant") {
  const RatingScale scale = RatingScale::standard();
  CHECK(scale.b == doctest::Approx(0.005756462732485115).epsilon(1e-15));
  CHECK(scale.b == std::log(10.0) / 400.0);
  CHECK(scale.b * scale.b == doctest::Approx(3.31369e-05).epsilon(1e-5));
}

TEST_CASE("logistic midpoint and symmetry") {
  CHECK(logistic(0.0) == 0.5);
  for (double x : {1e-8, 0.3, 1.0, 5.0, 36.0, 200.0, 700.0, 1e6, 1e300}) {
    const double lo = logistic(-x);
    const double hi = logistic(x);
    CHECK(hi >= 0.0);
    CHECK(hi <= 1.0);
    CHECK(lo >= 0.0);
    CHECK(lo <= 1.0);
    CHECK(std::abs(hi + lo - 1.0) <= 1e-15);
  }
  // No overflow at extreme arguments; saturation is allowed.
  CHECK(std::isfinite(logistic(std::numeric_limits<double>::max())));
  CHECK(std::isfinite(logistic(-std::numeric_limits<double>::max())));
  CHECK(logistic(800.0) == 1.0);
  CHECK(logistic(-800.0) == doctest::Approx(0.0));
}

TEST_CASE("logistic strictly increasing over a wide grid") {
  // +-30 stays clear of double saturation, where adjacent values collide.
  double prev = logistic(-30.0);
  for (double x = -29.5; x <= 30.0; x += 0.5) {
    const double cur = logistic(x);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("win probability anchors") {
  const RatingScale scale = RatingScale::standard();
  CHECK(win_probability(1500.0, 1500.0, scale) == 0.5);
  // A 400-point gap is exactly 10:1 odds on this scale.
  CHECK(win_probability(1900.0, 1500.0, scale) ==
        doctest::Approx(10.0 / 11.0).epsilon(1e-15));
  CHECK(win_probability(1500.0, 1900.0, scale) ==
        doctest::Approx(1.0 / 11.0).epsilon(1e-15));
}

TEST_CASE("win probability complement and translation") {
  const RatingScale scale = RatingScale::standard();
  test_support::Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    // Ratings on a 1/64 grid keep the shifted sums exactly representable, so
    // the translation comparison below can demand bitwise equality.
    const double a = 800.0 + rng.below(115200) / 64.0;
    const double b = 800.0 + rng.below(115200) / 64.0;
    const double p = win_probability(a, b, scale);
    const double q = win_probability(b, a, scale);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
    CHECK(std::abs(p + q - 1.0) <= 1e-15);
    CHECK(win_probability(a + 256.0, b + 256.0, scale) == p);
  }
}

TEST_CASE("win probability rejects non-finite input") {
  const RatingScale scale = RatingScale::standard();
  const double inf = std::numeric_limits<double>::infinity();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS((void)win_probability(inf, 1500.0, scale), std::domain_error);
  CHECK_THROWS_AS((void)win_probability(1500.0, -inf, scale), std::domain_error);
  CHECK_THROWS_AS((void)win_probability(nan, 1500.0, scale), std::domain_error);
}

TEST_CASE("initial state") {
  const ratekit::PlayerState s = ratekit::initial_state(350.0);
  CHECK(s.mu == 1500.0);
  CHECK(s.sigma2 == 350.0 * 350.0);
  CHECK_THROWS_AS((void)ratekit::initial_state(0.0), std::domain_error);
  CHECK_THROWS_AS((void)ratekit::initial_state(-5.0), std::domain_error);
}

TEST_CASE("outcome score helpers") {
  CHECK(ratekit::score(ratekit::Outcome::win) == 1.0);
  CHECK(ratekit::score(ratekit::Outcome::loss) == 0.0);
  CHECK(ratekit::opposite(ratekit::Outcome::win) == ratekit::Outcome::loss);
  CHECK(ratekit::opposite(ratekit::Outcome::loss) == ratekit::Outcome::win);
}
