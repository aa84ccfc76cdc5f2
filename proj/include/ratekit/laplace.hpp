#pragma once

#include <Eigen/Dense>
#include <functional>

#include "ratekit/core.hpp"

namespace ratekit {

// One match between two players with jointly Gaussian prior beliefs over
// their per-surface ratings. theta stacks player i's ratings then player
// j's; the prior covariance is block-diagonal with one positive-definite
// block per player.
struct LogPosteriorProblem {
  Eigen::VectorXd mu;     // 2n prior mean
  Eigen::MatrixXd sigma;  // 2n x 2n block-diagonal prior covariance
  int played = 0;         // surface the match was played on
  Outcome s_ij = Outcome::win;  // score of player i
  RatingScale scale = RatingScale::standard();

  int surfaces() const { return static_cast<int>(mu.size()) / 2; }

  static LogPosteriorProblem single_surface(
      double mu_i, double mu_j, double sigma_i, double sigma_j, Outcome s,
      RatingScale scale = RatingScale::standard());
  static LogPosteriorProblem from_blocks(
      const Eigen::VectorXd& mu_i, const Eigen::VectorXd& mu_j,
      const Eigen::MatrixXd& lam_i, const Eigen::MatrixXd& lam_j, int played,
      Outcome s, RatingScale scale = RatingScale::standard());
};

// Unnormalized log posterior (additive constant dropped), its gradient and
// Hessian in theta.
double log_posterior(const Eigen::VectorXd& theta,
                     const LogPosteriorProblem& prob);
Eigen::VectorXd jacobian(const Eigen::VectorXd& theta,
                         const LogPosteriorProblem& prob);
Eigen::MatrixXd hessian(const Eigen::VectorXd& theta,
                        const LogPosteriorProblem& prob);

struct JointPosteriorApprox {
  Eigen::VectorXd mu_prime;
  Eigen::MatrixXd cov_prime;  // symmetric positive definite
};

// One Newton step from the prior mean, with the covariance re-evaluated at
// the stepped mean. Dense factorizations throughout; this is the reference
// the closed forms are checked against.
JointPosteriorApprox newton_step(const LogPosteriorProblem& prob);

// Full Newton iteration to the posterior mode. Throws std::runtime_error
// with the iterate trace embedded in the message if the gradient norm does
// not reach tol within max_iter steps.
Eigen::VectorXd posterior_mode(const LogPosteriorProblem& prob,
                               double tol = 1e-12, int max_iter = 100);

struct QuadratureReport {
  int panels_per_axis = 0;
  int nodes_per_panel = 0;
  double zeroth_moment_drift = 0.0;  // relative change at the last refinement
};

struct MomentEstimate {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  QuadratureReport report;
};

// Exact posterior mean and covariance by adaptive tensor-product
// Gauss-Legendre quadrature; single-surface problems only. Panels refine
// until the zeroth moment is stable to target_rel. The panel sweep runs
// under OpenMP by default; parallel = false is the serial reference and
// produces bit-identical results by construction (fixed-order reduction).
MomentEstimate posterior_moments_numeric(const LogPosteriorProblem& prob,
                                         bool parallel = true,
                                         double target_rel = 1e-9);

// Shared quadrature kernel over a rectangle centered at `center` with the
// given half-widths; integrates exp(log_density) shifted by its value at
// the center.
MomentEstimate moments_by_quadrature(
    const std::function<double(double, double)>& log_density,
    const Eigen::Vector2d& center, const Eigen::Vector2d& half_width,
    double target_rel, bool parallel);

// Norm-relative errors: ||value - reference|| / ||reference||, Euclidean
// for vectors and Frobenius for matrices. Zero-norm reference is a domain
// error.
double relative_error(const Eigen::VectorXd& value,
                      const Eigen::VectorXd& reference);
double relative_error(const Eigen::MatrixXd& value,
                      const Eigen::MatrixXd& reference);

}  // namespace ratekit
