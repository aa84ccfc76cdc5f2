#include "ratekit/surface.hpp"

#include <cmath>
#include <stdexcept>

namespace ratekit {

SurfaceSet SurfaceSet::default_set() { return {{"clay", "grass", "hard"}}; }

int SurfaceSet::index_of(std::string_view name) const {
  for (int i = 0; i < size(); ++i)
    if (names[i] == name) return i;
  return -1;
}

Eigen::MatrixXd SurfaceCovariance::matrix() const {
  return sigma.asDiagonal() * rho * sigma.asDiagonal();
}

void SurfaceCovariance::validate() const {
  const auto n = sigma.size();
  if (n == 0 || rho.rows() != n || rho.cols() != n)
    throw std::domain_error("SurfaceCovariance: shape mismatch");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(sigma[i] > 0.0))
      throw std::domain_error("SurfaceCovariance: non-positive stdev");
    if (rho(i, i) != 1.0)
      throw std::domain_error("SurfaceCovariance: diagonal must be 1");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (rho(i, j) != rho(j, i))
        throw std::domain_error("SurfaceCovariance: asymmetric correlation");
      if (std::abs(rho(i, j)) > 1.0)
        throw std::domain_error("SurfaceCovariance: correlation outside [-1,1]");
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(rho);
  if (llt.info() != Eigen::Success)
    throw std::domain_error("SurfaceCovariance: correlation not positive definite");
}

SurfacePlayerState initial_surface_state(const Eigen::VectorXd& sigma0,
                                         double mu0) {
  SurfacePlayerState s;
  s.mu = Eigen::VectorXd::Constant(sigma0.size(), mu0);
  s.sigma2 = sigma0.array().square();
  return s;
}

namespace {

void check_surface_index(int played, Eigen::Index n, const char* who) {
  if (played < 0 || played >= n)
    throw std::out_of_range(std::string(who) + ": surface index out of range");
}

}  // namespace

Eigen::MatrixXd neg_inv_hessian(const SurfaceCovariance& cov_i,
                                const SurfaceCovariance& cov_j, double p_ij,
                                int played, RatingScale scale) {
  cov_i.validate();
  cov_j.validate();
  if (!(p_ij > 0.0) || !(p_ij < 1.0))
    throw std::domain_error("neg_inv_hessian: probability outside (0,1)");
  const Eigen::MatrixXd lam_i = cov_i.matrix();
  const Eigen::MatrixXd lam_j = cov_j.matrix();
  const Eigen::Index n = lam_i.rows();
  if (lam_j.rows() != n)
    throw std::domain_error("neg_inv_hessian: player dimension mismatch");
  check_surface_index(played, n, "neg_inv_hessian");
  const double b2 = scale.b * scale.b;
  const double info = b2 * p_ij * (1.0 - p_ij);
  // Rank-one correction: (Sigma + W) with W = -info/det * u u^T, where u
  // stacks the played-surface covariance columns of the two players with
  // opposite signs.
  const double det = 1.0 + info * (lam_i(played, played) + lam_j(played, played));
  Eigen::VectorXd u(2 * n);
  u.head(n) = lam_i.col(played);
  u.tail(n) = -lam_j.col(played);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  out.topLeftCorner(n, n) = lam_i;
  out.bottomRightCorner(n, n) = lam_j;
  out.noalias() -= (info / det) * u * u.transpose();
  return out;
}

Eigen::VectorXd closed_form_step(const SurfaceCovariance& cov_i,
                                 const SurfaceCovariance& cov_j,
                                 const Eigen::VectorXd& mu, Outcome s_ij,
                                 int played, RatingScale scale) {
  cov_i.validate();
  cov_j.validate();
  const Eigen::MatrixXd lam_i = cov_i.matrix();
  const Eigen::MatrixXd lam_j = cov_j.matrix();
  const Eigen::Index n = lam_i.rows();
  if (lam_j.rows() != n || mu.size() != 2 * n)
    throw std::domain_error("closed_form_step: dimension mismatch");
  check_surface_index(played, n, "closed_form_step");
  const double p_ij = win_probability(mu[played], mu[n + played], scale);
  const double b2 = scale.b * scale.b;
  const double c = 1.0 / (1.0 + b2 * p_ij * (1.0 - p_ij) *
                                    (lam_i(played, played) + lam_j(played, played)));
  const double s = score(s_ij);
  Eigen::VectorXd out(2 * n);
  out.head(n) = scale.b * c * (s - p_ij) * lam_i.col(played);
  out.tail(n) = scale.b * c * ((1.0 - s) - (1.0 - p_ij)) * lam_j.col(played);
  return out;
}

double cross_surface_delta(double delta_m, double sigma_l, double sigma_m,
                           double rho_ml) {
  return sigma_l / sigma_m * rho_ml * delta_m;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> genelo_update(
    const Eigen::VectorXd& mu1, const Eigen::VectorXd& mu2, int winner,
    const SurfaceCovariance& cov, int played, RatingScale scale) {
  if (winner != 1 && winner != 2)
    throw std::invalid_argument("genelo_update: winner must be 1 or 2");
  const Eigen::Index n = mu1.size();
  if (mu2.size() != n || cov.sigma.size() != n)
    throw std::domain_error("genelo_update: dimension mismatch");
  check_surface_index(played, n, "genelo_update");
  const double p12 = win_probability(mu1[played], mu2[played], scale);
  const double b2 = scale.b * scale.b;
  const double sigma2_m = cov.sigma[played] * cov.sigma[played];
  // Equal covariances let the damping constant collapse to a scalar.
  const double c = 1.0 / (1.0 + 2.0 * b2 * p12 * (1.0 - p12) * sigma2_m);
  const double s = winner == 1 ? 1.0 : 0.0;
  Eigen::VectorXd gain(n);
  for (Eigen::Index l = 0; l < n; ++l)
    gain[l] = cov.sigma[played] * cov.sigma[l] * cov.rho(played, l) * scale.b * c;
  return {mu1 + gain * (s - p12), mu2 + gain * ((1.0 - s) - (1.0 - p12))};
}

std::pair<SurfacePlayerState, SurfacePlayerState> vgenelo_update(
    const SurfacePlayerState& s1, const SurfacePlayerState& s2, int winner,
    const Eigen::MatrixXd& rho, int played, const VeloParams& params) {
  if (winner != 1 && winner != 2)
    throw std::invalid_argument("vgenelo_update: winner must be 1 or 2");
  const Eigen::Index n = s1.mu.size();
  if (s2.mu.size() != n || s1.sigma2.size() != n || s2.sigma2.size() != n ||
      rho.rows() != n || rho.cols() != n)
    throw std::domain_error("vgenelo_update: dimension mismatch");
  check_surface_index(played, n, "vgenelo_update");
  const RatingScale scale = params.scale;
  const double b = scale.b;
  const double p12 = win_probability(s1.mu[played], s2.mu[played], scale);
  const double c =
      1.0 / (1.0 + b * b * p12 * (1.0 - p12) *
                       (s1.sigma2[played] + s2.sigma2[played]));
  const double s = winner == 1 ? 1.0 : 0.0;
  const double sd1m = std::sqrt(s1.sigma2[played]);
  const double sd2m = std::sqrt(s2.sigma2[played]);
  SurfacePlayerState n1 = s1;
  SurfacePlayerState n2 = s2;
  for (Eigen::Index l = 0; l < n; ++l) {
    n1.mu[l] += std::sqrt(s1.sigma2[l]) * sd1m * rho(played, l) * b * c * (s - p12);
    n2.mu[l] += std::sqrt(s2.sigma2[l]) * sd2m * rho(played, l) * b * c *
                ((1.0 - s) - (1.0 - p12));
  }
  const double p12_post = win_probability(n1.mu[played], n2.mu[played], scale);
  // Played-surface shrink fractions with the prior variances; unplayed
  // surfaces shrink by the squared correlation times the played fraction.
  const double base1 =
      shrink_fraction(p12_post, s1.sigma2[played], s2.sigma2[played], scale);
  const double base2 =
      shrink_fraction(p12_post, s2.sigma2[played], s1.sigma2[played], scale);
  const double floor2 = params.sigma_floor * params.sigma_floor;
  for (Eigen::Index l = 0; l < n; ++l) {
    const double r2 = rho(played, l) * rho(played, l);
    n1.sigma2[l] = std::max(
        floor2, s1.sigma2[l] * (1.0 - params.variance_reduction * (base1 * r2)));
    n2.sigma2[l] = std::max(
        floor2, s2.sigma2[l] * (1.0 - params.variance_reduction * (base2 * r2)));
  }
  return {n1, n2};
}

}  // namespace ratekit
