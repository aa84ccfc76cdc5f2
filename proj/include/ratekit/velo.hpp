#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ratekit/core.hpp"

namespace ratekit {

// Variance schedule applied after the mean update. proportional_to_l
// multiplies the shrink fraction by a constant; proportional_to_sigma2
// re-inflates by a fixed fraction of the current variance; constant adds a
// fixed amount of variance back.
enum class EtaMode { proportional_to_l, proportional_to_sigma2, constant };

struct VeloParams {
  double variance_reduction = 1.0;  // scales the shrink fraction, in [0, 1]
  double sigma_floor = 0.0;         // lower bound on the posterior stdev
  EtaMode eta_mode = EtaMode::proportional_to_l;
  double alpha = 0.0;  // proportional_to_sigma2 re-inflation fraction
  double eta = 0.0;    // constant re-inflation stdev
  RatingScale scale = RatingScale::standard();
};

// Gain-damping constant in (0, 1]: the factor by which prior uncertainty
// shrinks the raw gradient step. Symmetric in the two variances.
double shrink_constant(double p_ij, double sigma2_i, double sigma2_j,
                       RatingScale scale = RatingScale::standard());

// Per-match gain replacing Elo's fixed k.
double k_factor(double sigma2_i, double shrink_c,
                RatingScale scale = RatingScale::standard());

// Fraction of player i's variance removed by one match, evaluated at the
// post-update win probability. Lies in (0, 1).
double shrink_fraction(double p_post, double sigma2_i, double sigma2_j,
                       RatingScale scale = RatingScale::standard());

// One match update for both players: simultaneous mean steps from the prior
// means, then a shared post-update probability drives both variance
// updates. winner is 1 or 2.
std::pair<PlayerState, PlayerState> velo_update(const PlayerState& s1,
                                                const PlayerState& s2,
                                                int winner,
                                                const VeloParams& params);

// Variance decay under repeated matches with the win probability pinned at
// 1/2 and a fixed-variance opponent, using the raw shrink rule (no
// reduction factor, no floor). Row 0 reports the initial state; its shrink
// fraction is meaningless and set to NaN.
struct PinnedTrajectoryRow {
  int matches;
  double l;      // shrink fraction at this state
  double sigma;  // stdev after `matches` updates
  double k;      // gain at this state
};
std::vector<PinnedTrajectoryRow> pinned_variance_trajectory(
    double sigma_i0, double sigma_j, std::span<const int> checkpoints,
    RatingScale scale = RatingScale::standard());

}  // namespace ratekit
