#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ratekit/fitting.hpp"
#include "test_support.hpp"

using ratekit::Execution;
using ratekit::FitResult;
using ratekit::MatchRecord;
using ratekit::ModelKind;
using ratekit::ParamAxis;
using ratekit::ParamSpace;

namespace {

// Small synthetic stream with a real skill ordering so likelihoods are
// informative: lower-numbered ids are stronger.
std::vector<MatchRecord> training_stream(int matches, std::uint64_t seed) {
  test_support::Rng rng(seed);
  std::vector<MatchRecord> out;
  const int players = 12;
  int year = 2012, month = 1, day = 1;
  for (int m = 0; m < matches; ++m) {
    day += 1;
    if (day > 28) {
      day = 1;
      if (++month > 12) {
        month = 1;
        ++year;
      }
    }
    int i = rng.below(players);
    int j = rng.below(players);
    while (j == i) j = rng.below(players);
    const double skill_i = 1650.0 - 25.0 * i;
    const double skill_j = 1650.0 - 25.0 * j;
    const double p = ratekit::win_probability(skill_i, skill_j);
    const bool i_wins = rng.uniform() < p;
    MatchRecord r;
    r.date = ratekit::Date{year, month, day};
    r.tourney_id = std::to_string(year) + "-1";
    r.match_num = m;
    r.winner_id = std::to_string(i_wins ? i : j);
    r.loser_id = std::to_string(i_wins ? j : i);
    r.surface = m % 3 == 0 ? "clay" : (m % 3 == 1 ? "grass" : "hard");
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("first-encounter forecasts pin the likelihood") {
  // A single match between two unseen players is a coin flip under every
  // model, so the average negative log-likelihood is exactly log 2.
  const auto stream = training_stream(1, 1);
  const auto config = ratekit::make_config(ModelKind::velo, {});
  CHECK(ratekit::avg_neg_loglike(config, stream) == std::log(2.0));
  const std::vector<MatchRecord> empty;
  CHECK_THROWS_AS((void)ratekit::avg_neg_loglike(config, empty),
                  std::invalid_argument);
}

TEST_CASE("likelihood evaluation is deterministic") {
  const auto stream = training_stream(400, 2);
  const auto config = ratekit::make_config(
      ModelKind::velo, {{std::string("sigma0"), std::string("130")},
                        {std::string("B"), std::string("45")}});
  const double first = ratekit::avg_neg_loglike(config, stream);
  const double second = ratekit::avg_neg_loglike(config, stream);
  CHECK(first == second);
  CHECK(first > 0.0);
  CHECK(first < std::log(2.0));  // better than coin flipping on this stream
}

TEST_CASE("grid fit covers every point exactly once in enumeration order") {
  const auto stream = training_stream(250, 3);
  ParamSpace space;
  space.model = ModelKind::velo;
  space.axes.push_back(ParamAxis{"sigma0", {80.0, 120.0, 160.0}});
  space.axes.push_back(ParamAxis{"B", {30.0, 50.0}});
  space.fixed["A"] = "1";
  const FitResult result = ratekit::fit(space, stream, Execution::serial);

  REQUIRE(result.param_names == std::vector<std::string>{"B", "sigma0"});
  REQUIRE(result.grid_evaluations == 6);
  REQUIRE(result.evaluation_log.size() == 6);
  CHECK(result.rejected_grid_points == 0);

  std::set<std::pair<double, double>> seen;
  for (std::size_t i = 0; i < 6; ++i) {
    const auto& entry = result.evaluation_log[i];
    REQUIRE(entry.values.size() == 2);
    seen.insert({entry.values[0], entry.values[1]});
    CHECK(entry.neg_loglike > 0.0);
  }
  CHECK(seen.size() == 6);

  // The reported optimum is the minimum of its own log.
  double best = result.evaluation_log[0].neg_loglike;
  for (const auto& entry : result.evaluation_log)
    best = std::min(best, entry.neg_loglike);
  CHECK(result.train_avg_neg_loglike == best);
  // And the reported parameters reproduce it.
  std::map<std::string, std::string> as_text;
  for (const auto& [k, v] : result.best_params) {
    char buf[64];
    snprintf(buf, sizeof buf, "%.17g", v);
    as_text[k] = buf;
  }
  as_text["A"] = "1";
  const auto config = ratekit::make_config(ModelKind::velo, as_text);
  CHECK(ratekit::avg_neg_loglike(config, stream) == result.train_avg_neg_loglike);
}

TEST_CASE("parallel and serial fits are bit-identical") {
  const auto stream = training_stream(300, 4);
  ParamSpace space;
  space.model = ModelKind::velo;
  space.axes.push_back(ParamAxis{"sigma0", {70.0, 100.0, 130.0, 160.0, 190.0}});
  space.axes.push_back(ParamAxis{"A", {0.0, 0.5, 1.0}});
  space.axes.push_back(ParamAxis{"B", {25.0, 45.0}});
  const FitResult serial = ratekit::fit(space, stream, Execution::serial);
  const FitResult parallel = ratekit::fit(space, stream, Execution::parallel);

  CHECK(serial.best_params == parallel.best_params);
  CHECK(serial.train_avg_neg_loglike == parallel.train_avg_neg_loglike);
  REQUIRE(serial.evaluation_log.size() == parallel.evaluation_log.size());
  for (std::size_t i = 0; i < serial.evaluation_log.size(); ++i) {
    CHECK(serial.evaluation_log[i].values == parallel.evaluation_log[i].values);
    CHECK(serial.evaluation_log[i].neg_loglike ==
          parallel.evaluation_log[i].neg_loglike);
  }
}

TEST_CASE("ties break toward the smallest parameter tuple") {
  // With a single match every K value scores exactly log 2, so the tie must
  // resolve to the smallest K even though it is listed last.
  const auto stream = training_stream(1, 5);
  ParamSpace space;
  space.model = ModelKind::elo;
  space.axes.push_back(ParamAxis{"K", {40.0, 32.0, 20.0}});
  const FitResult result = ratekit::fit(space, stream, Execution::parallel);
  CHECK(result.best_params.at("K") == 20.0);
  CHECK(result.train_avg_neg_loglike == std::log(2.0));
}

TEST_CASE("invalid grid combinations are rejected and counted") {
  const auto stream = training_stream(60, 6);
  ParamSpace space;
  space.model = ModelKind::vgenelo;
  space.fixed = {{"sigma_clay", "100"}, {"sigma_grass", "100"},
                 {"sigma_hard", "100"}, {"rho_clay_grass", "0.9"},
                 {"A", "1"}, {"B", "40"}};
  space.axes.push_back(ParamAxis{"rho_clay_hard", {0.9, -0.9}});
  space.axes.push_back(ParamAxis{"rho_grass_hard", {0.9, -0.9}});
  const FitResult result = ratekit::fit(space, stream, Execution::parallel);
  // (0.9, -0.9) and (-0.9, 0.9) are not positive definite together with
  // rho_clay_grass = 0.9.
  CHECK(result.rejected_grid_points == 2);
  CHECK(result.grid_evaluations == 2);
  CHECK(result.evaluation_log.size() == 2);
}

TEST_CASE("an all-invalid grid is an error") {
  const auto stream = training_stream(10, 7);
  ParamSpace space;
  space.model = ModelKind::velo;
  space.axes.push_back(ParamAxis{"sigma0", {-5.0, -10.0}});
  CHECK_THROWS_AS((void)ratekit::fit(space, stream, Execution::serial),
                  std::runtime_error);
}

TEST_CASE("axis validation") {
  const auto stream = training_stream(10, 8);
  ParamSpace space;
  space.model = ModelKind::velo;
  space.axes.push_back(ParamAxis{"sigma0", {}});
  CHECK_THROWS_AS((void)ratekit::fit(space, stream, Execution::serial),
                  std::invalid_argument);
  space.axes[0].values = {100.0};
  space.axes.push_back(ParamAxis{"sigma0", {120.0}});
  CHECK_THROWS_AS((void)ratekit::fit(space, stream, Execution::serial),
                  std::invalid_argument);
}

TEST_CASE("refinement only improves on the grid") {
  const auto stream = training_stream(300, 9);
  ParamSpace coarse;
  coarse.model = ModelKind::velo;
  coarse.axes.push_back(ParamAxis{"sigma0", {60.0, 140.0, 220.0}});
  coarse.fixed["A"] = "1";
  coarse.fixed["B"] = "40";
  const FitResult grid_only = ratekit::fit(coarse, stream, Execution::serial);

  ParamSpace refined = coarse;
  refined.refine = true;
  refined.refine_seeds = 2;
  refined.bounds["sigma0"] = {40.0, 260.0};
  const FitResult result = ratekit::fit(refined, stream, Execution::serial);

  CHECK(result.train_avg_neg_loglike <= grid_only.train_avg_neg_loglike);
  CHECK(result.evaluation_log.size() > result.grid_evaluations);
  CHECK(result.best_params.at("sigma0") >= 40.0);
  CHECK(result.best_params.at("sigma0") <= 260.0);

  // Refinement is deterministic too.
  const FitResult again = ratekit::fit(refined, stream, Execution::parallel);
  CHECK(again.best_params == result.best_params);
  CHECK(again.train_avg_neg_loglike == result.train_avg_neg_loglike);
  REQUIRE(again.evaluation_log.size() == result.evaluation_log.size());
  for (std::size_t i = 0; i < again.evaluation_log.size(); ++i)
    CHECK(again.evaluation_log[i].neg_loglike ==
          result.evaluation_log[i].neg_loglike);
}

TEST_CASE("player relabeling does not change the fit") {
  auto stream = training_stream(200, 10);
  ParamSpace space;
  space.model = ModelKind::velo;
  space.axes.push_back(ParamAxis{"sigma0", {90.0, 150.0}});
  const FitResult base = ratekit::fit(space, stream, Execution::serial);

  for (MatchRecord& r : stream) {
    r.winner_id = "player-" + r.winner_id;
    r.loser_id = "player-" + r.loser_id;
  }
  const FitResult relabeled = ratekit::fit(space, stream, Execution::serial);
  CHECK(base.train_avg_neg_loglike == relabeled.train_avg_neg_loglike);
  CHECK(base.best_params == relabeled.best_params);
}
