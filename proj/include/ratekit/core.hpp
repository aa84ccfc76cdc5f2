#pragma once

namespace ratekit {

// Logit scale of the rating axis. With the standard scale a 400-point
// rating gap corresponds to 10:1 odds.
struct RatingScale {
  double b;
  static RatingScale standard();
};

struct PlayerState {
  double mu;      // rating, points
  double sigma2;  // rating variance, points^2, always > 0
};

// New player prior: mean 1500, standard deviation sigma0.
PlayerState initial_state(double sigma0);

enum class Outcome : int { loss = 0, win = 1 };

inline double score(Outcome o) { return o == Outcome::win ? 1.0 : 0.0; }
inline Outcome opposite(Outcome o) {
  return o == Outcome::win ? Outcome::loss : Outcome::win;
}

// Saturates toward 0/1 without overflow for any finite x.
double logistic(double x);

// P(i beats j) under the paired-comparison model. Strictly increasing in
// mu_i, complement-symmetric in the argument swap. Throws std::domain_error
// on non-finite ratings.
double win_probability(double mu_i, double mu_j,
                       RatingScale scale = RatingScale::standard());

}  // namespace ratekit
