#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ratekit/evaluation.hpp"
#include "test_support.hpp"

using ratekit::Dataset;
using ratekit::Date;
using ratekit::MatchRecord;
using ratekit::McNemarResult;
using ratekit::ModelKind;

namespace {

MatchRecord match(int y, int m, int d, const std::string& w,
                  const std::string& l, const std::string& surface = "hard",
                  int num = 0) {
  MatchRecord r;
  r.date = Date{y, m, d};
  r.tourney_id = std::to_string(y) + "-0";
  r.match_num = num;
  r.winner_id = w;
  r.loser_id = l;
  r.surface = surface;
  return r;
}

Dataset dataset(std::vector<MatchRecord> train, std::vector<MatchRecord> test) {
  Dataset ds;
  ds.summary = ratekit::summarize(train, test);
  ds.train = std::move(train);
  ds.test = std::move(test);
  return ds;
}

double phi_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("backtest scores only the test split") {
  // Train: a beats b twice, so a enters the test period as the favorite.
  const auto config = ratekit::make_config(ModelKind::elo, {});
  const Dataset ds = dataset(
      {match(2015, 1, 5, "a", "b"), match(2015, 1, 6, "a", "b")},
      {match(2016, 1, 5, "a", "b", "hard"), match(2016, 1, 6, "b", "a", "hard")});
  const ratekit::BacktestReport report = ratekit::backtest(config, ds);
  REQUIRE(report.per_match.size() == 2);

  // Replay training by hand: 1500/1500 -> 1516/1484 -> p = win_probability.
  ratekit::PlayerState a{1500.0, 1.0}, b{1500.0, 1.0};
  std::tie(a, b) = ratekit::elo_update(a, b, ratekit::Outcome::win, 32.0);
  std::tie(a, b) = ratekit::elo_update(a, b, ratekit::Outcome::win, 32.0);
  const double p1 = ratekit::win_probability(a.mu, b.mu);
  CHECK(report.per_match[0].p_winner == p1);
  CHECK(report.per_match[0].correct);
  CHECK(report.per_match[0].residual == 1.0 - p1);

  std::tie(a, b) = ratekit::elo_update(a, b, ratekit::Outcome::win, 32.0);
  const double p2 = ratekit::win_probability(b.mu, a.mu);
  CHECK(report.per_match[1].p_winner == p2);
  CHECK_FALSE(report.per_match[1].correct);

  CHECK(report.accuracy == 0.5);
  CHECK(report.avg_neg_loglike ==
        doctest::Approx(-(std::log(p1) + std::log(p2)) / 2.0).epsilon(1e-15));

  const auto flags = report.correct_flags();
  REQUIRE(flags.size() == 2);
  CHECK(flags[0] == 1);
  CHECK(flags[1] == 0);
}

TEST_CASE("an exact coin flip predicts the smaller player id") {
  const auto config = ratekit::make_config(ModelKind::elo, {});
  // No training matches: every test forecast is exactly one half.
  const Dataset ds = dataset(
      {}, {match(2016, 1, 5, "alpha", "beta"), match(2016, 1, 6, "delta", "gamma"),
           match(2016, 1, 7, "zeta", "epsilon")});
  const ratekit::BacktestReport report = ratekit::backtest(config, ds);
  REQUIRE(report.per_match.size() == 3);
  CHECK(report.per_match[0].p_winner == 0.5);
  CHECK(report.per_match[0].correct);        // alpha < beta, winner alpha
  CHECK(report.per_match[1].correct);        // delta < gamma, winner delta
  CHECK_FALSE(report.per_match[2].correct);  // epsilon < zeta, winner zeta
}

TEST_CASE("paired comparison on balanced discordance is a wash") {
  std::vector<std::uint8_t> f1, f2;
  for (int i = 0; i < 25; ++i) {  // 25 each way plus concordant filler
    f1.push_back(1); f2.push_back(0);
    f1.push_back(0); f2.push_back(1);
    f1.push_back(1); f2.push_back(1);
    f1.push_back(0); f2.push_back(0);
  }
  const McNemarResult r = ratekit::mcnemar_one_sided(f1, f2);
  CHECK(r.n12 == 25);
  CHECK(r.n21 == 25);
  REQUIRE(r.z.has_value());
  CHECK(*r.z == 0.0);
  CHECK(*r.p_value == 0.5);
}

TEST_CASE("paired comparison matches the normal tail") {
  std::vector<std::uint8_t> f1, f2;
  // n21 = 16, n12 = 0: z = 16 / 4 = 4.
  for (int i = 0; i < 16; ++i) {
    f1.push_back(0);
    f2.push_back(1);
  }
  for (int i = 0; i < 50; ++i) {  // concordant padding changes nothing
    f1.push_back(1);
    f2.push_back(1);
  }
  const McNemarResult r = ratekit::mcnemar_one_sided(f1, f2);
  REQUIRE(r.z.has_value());
  CHECK(*r.z == 4.0);
  CHECK(std::abs(*r.p_value - phi_tail(4.0)) <= 1e-12);
  CHECK(std::abs(*r.p_value - 3.167e-5) <= 1e-8);

  // The tail mapping at the significance-table landmark.
  CHECK(std::abs(phi_tail(2.887) - 0.0019) <= 1e-4);
  // A discordance pattern near that landmark.
  std::vector<std::uint8_t> g1(44, 0), g2(44, 1);
  for (int i = 0; i < 11; ++i) g1[i] = 1, g2[i] = 0;  // n12 = 11, n21 = 33
  const McNemarResult near = ratekit::mcnemar_one_sided(g1, g2);
  CHECK(*near.z == doctest::Approx(22.0 / std::sqrt(44.0)).epsilon(1e-12));
  CHECK(*near.p_value == doctest::Approx(phi_tail(*near.z)).epsilon(1e-12));
}

TEST_CASE("paired comparison is antisymmetric") {
  test_support::Rng rng(321);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 40 + rng.below(200);
    std::vector<std::uint8_t> f1(n), f2(n);
    for (int i = 0; i < n; ++i) {
      f1[i] = rng.uniform() < 0.6 ? 1 : 0;
      f2[i] = rng.uniform() < 0.6 ? 1 : 0;
    }
    const McNemarResult ab = ratekit::mcnemar_one_sided(f1, f2);
    const McNemarResult ba = ratekit::mcnemar_one_sided(f2, f1);
    CHECK(ab.n12 == ba.n21);
    CHECK(ab.n21 == ba.n12);
    if (ab.z.has_value()) {
      CHECK(*ab.z == -*ba.z);
      CHECK(*ab.p_value + *ba.p_value == doctest::Approx(1.0).epsilon(1e-12));
    }
    // Accuracy difference equals the discordance difference.
    long correct1 = 0, correct2 = 0;
    for (int i = 0; i < n; ++i) {
      correct1 += f1[i];
      correct2 += f2[i];
    }
    CHECK(correct2 - correct1 == ab.n21 - ab.n12);
  }
}

TEST_CASE("paired comparison edge cases") {
  const std::vector<std::uint8_t> same{1, 0, 1, 1, 0};
  const McNemarResult r = ratekit::mcnemar_one_sided(same, same);
  CHECK(r.n12 == 0);
  CHECK(r.n21 == 0);
  CHECK_FALSE(r.z.has_value());
  CHECK_FALSE(r.p_value.has_value());

  const std::vector<std::uint8_t> shorter{1, 0};
  CHECK_THROWS_AS((void)ratekit::mcnemar_one_sided(same, shorter),
                  std::invalid_argument);
}

TEST_CASE("new player cohort accounting") {
  // Build a sequence long enough that players introduced late form the
  // cohort. Ten warmup matches, window of two.
  std::vector<MatchRecord> matches;
  int num = 0;
  for (int i = 0; i < 10; ++i)
    matches.push_back(match(2015, 1, 1 + i % 27, "a", "b", "hard", num++));
  // "late" first appears at index 10 (>= warmup) and plays twice.
  matches.push_back(match(2015, 2, 1, "late", "a", "hard", num++));
  matches.push_back(match(2015, 2, 2, "b", "late", "hard", num++));
  // "once" appears only once: excluded from the cohort by the window.
  matches.push_back(match(2015, 2, 3, "once", "a", "hard", num++));

  const auto constant = ratekit::make_config(ModelKind::elo, {});
  const auto variance = ratekit::make_config(ModelKind::velo, {});
  const ratekit::NewPlayerCounts counts =
      ratekit::new_player_analysis(constant, variance, matches, 10, 2);
  CHECK(counts.total == 1);
  CHECK(counts.better_constant + counts.better_variance + counts.tied ==
        counts.total);

  // With no warmup every early player joins the cohort as well.
  const ratekit::NewPlayerCounts all =
      ratekit::new_player_analysis(constant, variance, matches, 0, 2);
  CHECK(all.total == 3);  // a, b, late ("once" still lacks appearances)
}

TEST_CASE("player residual series") {
  const auto config = ratekit::make_config(ModelKind::elo, {});
  std::vector<MatchRecord> matches{
      match(2015, 1, 5, "a", "b", "hard", 1),
      match(2015, 1, 6, "b", "a", "clay", 2),
      match(2015, 1, 7, "a", "c", "grass", 3),
  };
  const auto series = ratekit::player_residuals(config, matches, "a");
  REQUIRE(series.size() == 3);
  CHECK(series[0].index == 1);
  CHECK(series[0].score == 1.0);
  CHECK(series[0].p_hat == 0.5);
  CHECK(series[0].residual == 0.5);
  CHECK(series[0].opponent_id == "b");
  CHECK(series[1].score == 0.0);
  CHECK(series[1].opponent_id == "b");
  CHECK(series[1].surface == "clay");
  // After one win a is the favorite; p_hat reflects a's perspective.
  CHECK(series[1].p_hat > 0.5);
  CHECK(series[1].residual == series[1].score - series[1].p_hat);
  CHECK(series[2].index == 3);
  CHECK(series[2].opponent_id == "c");

  // The loser's perspective mirrors the winner's.
  const auto other = ratekit::player_residuals(config, matches, "b");
  CHECK(other[0].score == 0.0);
  CHECK(other[0].p_hat == 0.5);
  CHECK(other.size() == 2);

  CHECK_THROWS_AS((void)ratekit::player_residuals(config, matches, "nobody"),
                  std::invalid_argument);
}

TEST_CASE("surface restriction") {
  const Dataset ds = dataset(
      {match(2015, 1, 5, "a", "b", "clay", 1), match(2015, 1, 6, "a", "b", "hard", 2),
       match(2015, 1, 7, "a", "b", "clay", 3)},
      {match(2016, 1, 5, "a", "b", "grass", 1),
       match(2016, 1, 6, "a", "b", "clay", 2)});
  const Dataset clay = ratekit::surface_restrict(ds, "clay");
  REQUIRE(clay.train.size() == 2);
  REQUIRE(clay.test.size() == 1);
  CHECK(clay.train[0].match_num == 1);
  CHECK(clay.train[1].match_num == 3);
  CHECK(clay.summary.train.clay == 2);
  CHECK(clay.summary.test.clay == 1);
  CHECK(clay.summary.all.total == 3);

  const Dataset grass = ratekit::surface_restrict(ds, "grass");
  CHECK(grass.train.empty());
  CHECK(grass.test.size() == 1);

  CHECK_THROWS_AS((void)ratekit::surface_restrict(ds, "carpet"),
                  std::invalid_argument);
}

TEST_CASE("backtests on the same split share match identity") {
  // The per-match vectors of two models align 1:1 with the test split, so
  // paired comparisons are valid.
  std::vector<MatchRecord> train, test;
  test_support::Rng rng(331);
  int num = 0;
  for (int i = 0; i < 120; ++i) {
    const int a = rng.below(6);
    int b = rng.below(6);
    while (b == a) b = rng.below(6);
    auto r = match(2015 + i / 60, 1 + (i / 5) % 12, 1 + i % 28,
                   std::to_string(a), std::to_string(b),
                   i % 2 == 0 ? "hard" : "clay", num++);
    (i < 60 ? train : test).push_back(r);
  }
  const Dataset ds = dataset(train, test);
  const auto elo = ratekit::make_config(ModelKind::elo, {});
  const auto velo = ratekit::make_config(ModelKind::velo, {});
  const auto r1 = ratekit::backtest(elo, ds);
  const auto r2 = ratekit::backtest(velo, ds);
  REQUIRE(r1.per_match.size() == r2.per_match.size());
  for (std::size_t i = 0; i < r1.per_match.size(); ++i) {
    CHECK(r1.per_match[i].winner_id == r2.per_match[i].winner_id);
    CHECK(r1.per_match[i].date == r2.per_match[i].date);
  }
  const McNemarResult mc =
      ratekit::mcnemar_one_sided(r1.correct_flags(), r2.correct_flags());
  CHECK(mc.n12 + mc.n21 <= static_cast<long>(r1.per_match.size()));
}
