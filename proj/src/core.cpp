#include "ratekit/core.hpp"

#include <cmath>
#include <stdexcept>

namespace ratekit {

RatingScale RatingScale::standard() { return {std::log(10.0) / 400.0}; }

PlayerState initial_state(double sigma0) {
  if (!(sigma0 > 0.0)) throw std::domain_error("initial_state: sigma0 must be positive");
  return {1500.0, sigma0 * sigma0};
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);  // x < 0, no overflow
  return e / (1.0 + e);
}

double win_probability(double mu_i, double mu_j, RatingScale scale) {
  if (!std::isfinite(mu_i) || !std::isfinite(mu_j))
    throw std::domain_error("win_probability: non-finite rating");
  return logistic(scale.b * (mu_i - mu_j));
}

}  // namespace ratekit
