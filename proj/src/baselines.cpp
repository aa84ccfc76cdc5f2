#include "ratekit/baselines.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ratekit {

std::pair<PlayerState, PlayerState> elo_update(const PlayerState& state_i,
                                               const PlayerState& state_j,
                                               Outcome s_ij, double k,
                                               RatingScale scale) {
  if (!(k > 0.0)) throw std::domain_error("elo_update: k must be positive");
  const double p_ij = win_probability(state_i.mu, state_j.mu, scale);
  const double d = k * (score(s_ij) - p_ij);
  return {PlayerState{state_i.mu + d, state_i.sigma2},
          PlayerState{state_j.mu - d, state_j.sigma2}};
}

double glicko_g(double sigma2, RatingScale scale) {
  if (sigma2 < 0.0) throw std::domain_error("glicko_g: negative variance");
  const double b2 = scale.b * scale.b;
  return 1.0 / std::sqrt(1.0 + 3.0 * b2 * sigma2 /
                                   (std::numbers::pi * std::numbers::pi));
}

double glicko_expected(double mu_i, double mu_j, double sigma2_j,
                       RatingScale scale) {
  return logistic(glicko_g(sigma2_j, scale) * scale.b * (mu_i - mu_j));
}

PlayerState glicko_period_update(
    const PlayerState& player,
    std::span<const std::pair<PlayerState, Outcome>> opponents,
    const GlickoParams& params, RatingScale scale) {
  if (opponents.empty())
    throw std::invalid_argument("glicko_period_update: no opponents");
  if (!(player.sigma2 > 0.0))
    throw std::domain_error("glicko_period_update: non-positive variance");
  const double b = scale.b;
  double info = 0.0;      // accumulates 1/delta^2 up to the b^2 factor
  double residual = 0.0;  // sum of g(sigma2_j) * (s_ij - E_ij)
  for (const auto& [opp, s] : opponents) {
    const double g_j = glicko_g(opp.sigma2, scale);
    const double e_ij = glicko_expected(player.mu, opp.mu, opp.sigma2, scale);
    const double e_ji = glicko_expected(opp.mu, player.mu, player.sigma2, scale);
    info += g_j * g_j * e_ij * (1.0 - e_ji);
    residual += g_j * (score(s) - e_ij);
  }
  const double inv_delta2 = b * b * info;
  const double precision = 1.0 / player.sigma2 + inv_delta2;
  return {player.mu + (b / precision) * residual,
          1.0 / precision + params.c2};
}

double glicko_forecast(const PlayerState& a, const PlayerState& b,
                       RatingScale scale) {
  const double g = glicko_g(a.sigma2 + b.sigma2, scale);
  return logistic(g * scale.b * (a.mu - b.mu));
}

}  // namespace ratekit
