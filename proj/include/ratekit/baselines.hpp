#pragma once

#include <span>
#include <utility>

#include "ratekit/core.hpp"

namespace ratekit {

// Fixed-gain update: both players move by k * (score - expectation),
// so the rating sum is conserved exactly. Variances pass through.
std::pair<PlayerState, PlayerState> elo_update(
    const PlayerState& state_i, const PlayerState& state_j, Outcome s_ij,
    double k, RatingScale scale = RatingScale::standard());

// Rating-period grouping for the period update. calendar_month closes a
// period whenever the month of the incoming match changes; match_count
// closes after a fixed number of matches in the stream.
enum class PeriodRule { calendar_month, match_count };

struct GlickoParams {
  double sigma0_2 = 350.0 * 350.0;  // initial variance of a new player
  double c2 = 0.0;                  // per-period variance inflation, >= 0
  PeriodRule period = PeriodRule::calendar_month;
  int matches_per_period = 200;  // used by match_count only
};

// Variance-discounting factor applied to an opponent's rating gap.
// Decreasing in sigma2, equals 1 at sigma2 = 0.
double glicko_g(double sigma2, RatingScale scale = RatingScale::standard());

// Expected score of i against j given j's rating variance.
double glicko_expected(double mu_i, double mu_j, double sigma2_j,
                       RatingScale scale = RatingScale::standard());

// One rating-period update for a single player against the start-of-period
// states of all opponents faced in the period. Requires at least one
// opponent; zero-match players are handled by the caller (variance
// inflation only).
PlayerState glicko_period_update(
    const PlayerState& player,
    std::span<const std::pair<PlayerState, Outcome>> opponents,
    const GlickoParams& params, RatingScale scale = RatingScale::standard());

// Symmetric pre-match forecast P(a beats b) discounting the gap by the
// combined uncertainty of both players; complement-symmetric by
// construction.
double glicko_forecast(const PlayerState& a, const PlayerState& b,
                       RatingScale scale = RatingScale::standard());

}  // namespace ratekit
