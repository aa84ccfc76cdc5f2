#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ratekit/core.hpp"
#include "ratekit/velo.hpp"

namespace ratekit {

// Ordered set of playing surfaces. The math below is generic in the count;
// the dataset pipeline wires the default three.
struct SurfaceSet {
  std::vector<std::string> names;
  static SurfaceSet default_set();  // clay, grass, hard
  int size() const { return static_cast<int>(names.size()); }
  int index_of(std::string_view name) const;  // -1 when unknown
};

// Per-player covariance across surfaces, stored as stdevs plus a
// correlation matrix. rho must be symmetric with unit diagonal, entries in
// [-1, 1], and positive definite.
struct SurfaceCovariance {
  Eigen::VectorXd sigma;
  Eigen::MatrixXd rho;
  Eigen::MatrixXd matrix() const;  // sigma_q * sigma_l * rho_ql
  void validate() const;           // throws std::domain_error
};

struct SurfacePlayerState {
  Eigen::VectorXd mu;      // per-surface rating
  Eigen::VectorXd sigma2;  // per-surface variance
};
SurfacePlayerState initial_surface_state(const Eigen::VectorXd& sigma0,
                                         double mu0 = 1500.0);

// Posterior covariance of the stacked (player i, player j) rating vector
// after one match on surface `played` at win probability p_ij: the prior
// block-diagonal covariance plus a rank-one correction. Closed form; no
// matrix inversion.
Eigen::MatrixXd neg_inv_hessian(const SurfaceCovariance& cov_i,
                                const SurfaceCovariance& cov_j, double p_ij,
                                int played,
                                RatingScale scale = RatingScale::standard());

// Closed-form mean step for the stacked rating vector: the damped gradient
// direction at the prior mean. mu stacks player i's ratings then player
// j's. s_ij is the score of player i.
Eigen::VectorXd closed_form_step(const SurfaceCovariance& cov_i,
                                 const SurfaceCovariance& cov_j,
                                 const Eigen::VectorXd& mu, Outcome s_ij,
                                 int played,
                                 RatingScale scale = RatingScale::standard());

// How a mean shift on the played surface propagates to another surface.
double cross_surface_delta(double delta_m, double sigma_l, double sigma_m,
                           double rho_ml);

// Means-only update with one covariance shared by both players.
// winner is 1 or 2.
std::pair<Eigen::VectorXd, Eigen::VectorXd> genelo_update(
    const Eigen::VectorXd& mu1, const Eigen::VectorXd& mu2, int winner,
    const SurfaceCovariance& cov, int played,
    RatingScale scale = RatingScale::standard());

// Per-surface mean and variance update with per-player variances and a
// shared correlation matrix. Mean steps use the prior means; the shared
// post-update probability on the played surface drives the variance
// shrink, scaled by the squared correlation on unplayed surfaces. Applies
// the variance_reduction / sigma_floor schedule of params.
std::pair<SurfacePlayerState, SurfacePlayerState> vgenelo_update(
    const SurfacePlayerState& s1, const SurfacePlayerState& s2, int winner,
    const Eigen::MatrixXd& rho, int played, const VeloParams& params);

}  // namespace ratekit
