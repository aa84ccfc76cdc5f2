#include "ratekit/velo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ratekit {

double shrink_constant(double p_ij, double sigma2_i, double sigma2_j,
                       RatingScale scale) {
  if (!(p_ij > 0.0) || !(p_ij < 1.0))
    throw std::domain_error("shrink_constant: probability outside (0,1)");
  if (!(sigma2_i > 0.0) || !(sigma2_j > 0.0))
    throw std::domain_error("shrink_constant: non-positive variance");
  const double b2 = scale.b * scale.b;
  return 1.0 / (1.0 + b2 * p_ij * (1.0 - p_ij) * (sigma2_i + sigma2_j));
}

double k_factor(double sigma2_i, double shrink_c, RatingScale scale) {
  return scale.b * sigma2_i * shrink_c;
}

double shrink_fraction(double p_post, double sigma2_i, double sigma2_j,
                       RatingScale scale) {
  const double c = shrink_constant(p_post, sigma2_i, sigma2_j, scale);
  const double b2 = scale.b * scale.b;
  return p_post * (1.0 - p_post) * sigma2_i * b2 * c;
}

namespace {

double updated_variance(double sigma2, double l, const VeloParams& p) {
  const double floor2 = p.sigma_floor * p.sigma_floor;
  switch (p.eta_mode) {
    case EtaMode::proportional_to_l:
      return std::max(floor2, sigma2 * (1.0 - p.variance_reduction * l));
    case EtaMode::proportional_to_sigma2:
      return std::max(floor2, sigma2 * (1.0 - l + p.alpha));
    case EtaMode::constant:
      return std::max(floor2, sigma2 * (1.0 - l) + p.eta * p.eta);
  }
  throw std::logic_error("updated_variance: bad eta mode");
}

}  // namespace

std::pair<PlayerState, PlayerState> velo_update(const PlayerState& s1,
                                                const PlayerState& s2,
                                                int winner,
                                                const VeloParams& params) {
  if (winner != 1 && winner != 2)
    throw std::invalid_argument("velo_update: winner must be 1 or 2");
  const RatingScale scale = params.scale;
  const double p12 = win_probability(s1.mu, s2.mu, scale);
  const double c = shrink_constant(p12, s1.sigma2, s2.sigma2, scale);
  const double s = winner == 1 ? 1.0 : 0.0;
  // Both mean steps use the prior means.
  PlayerState n1{s1.mu + k_factor(s1.sigma2, c, scale) * (s - p12), s1.sigma2};
  PlayerState n2{s2.mu + k_factor(s2.sigma2, c, scale) * ((1.0 - s) - (1.0 - p12)),
                 s2.sigma2};
  // One shared post-update probability drives both variance updates; the
  // variances entering the shrink fractions are the prior ones.
  const double p12_post = win_probability(n1.mu, n2.mu, scale);
  n1.sigma2 = updated_variance(
      s1.sigma2, shrink_fraction(p12_post, s1.sigma2, s2.sigma2, scale), params);
  n2.sigma2 = updated_variance(
      s2.sigma2, shrink_fraction(p12_post, s2.sigma2, s1.sigma2, scale), params);
  return {n1, n2};
}

std::vector<PinnedTrajectoryRow> pinned_variance_trajectory(
    double sigma_i0, double sigma_j, std::span<const int> checkpoints,
    RatingScale scale) {
  if (!(sigma_i0 > 0.0) || !(sigma_j > 0.0))
    throw std::domain_error("pinned_variance_trajectory: non-positive stdev");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 0)
      throw std::invalid_argument(
          "pinned_variance_trajectory: negative checkpoint");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
      throw std::invalid_argument(
          "pinned_variance_trajectory: checkpoints must increase");
  }
  const double sigma2_j = sigma_j * sigma_j;
  double sigma2 = sigma_i0 * sigma_i0;
  std::vector<PinnedTrajectoryRow> rows;
  int last = 0;
  for (int cp : checkpoints) last = std::max(last, cp);
  auto row_at = [&](int matches) {
    PinnedTrajectoryRow r;
    r.matches = matches;
    r.l = matches == 0 ? std::numeric_limits<double>::quiet_NaN()
                       : shrink_fraction(0.5, sigma2, sigma2_j, scale);
    r.sigma = std::sqrt(sigma2);
    r.k = k_factor(sigma2, shrink_constant(0.5, sigma2, sigma2_j, scale), scale);
    return r;
  };
  auto wanted = [&](int m) {
    for (int cp : checkpoints)
      if (cp == m) return true;
    return false;
  };
  if (wanted(0)) rows.push_back(row_at(0));
  for (int m = 1; m <= last; ++m) {
    sigma2 *= 1.0 - shrink_fraction(0.5, sigma2, sigma2_j, scale);
    if (wanted(m)) rows.push_back(row_at(m));
  }
  return rows;
}

}  // namespace ratekit
