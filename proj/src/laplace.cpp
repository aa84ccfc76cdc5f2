#include "ratekit/laplace.hpp"

#include <omp.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ratekit {

namespace {

// log(logistic(x)) without underflow on either side.
double log_logistic(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

void check_problem(const LogPosteriorProblem& prob) {
  const Eigen::Index d = prob.mu.size();
  if (d == 0 || d % 2 != 0 || prob.sigma.rows() != d || prob.sigma.cols() != d)
    throw std::domain_error("LogPosteriorProblem: shape mismatch");
  const int n = prob.surfaces();
  if (prob.played < 0 || prob.played >= n)
    throw std::out_of_range("LogPosteriorProblem: surface index out of range");
}

}  // namespace

LogPosteriorProblem LogPosteriorProblem::single_surface(double mu_i,
                                                        double mu_j,
                                                        double sigma_i,
                                                        double sigma_j,
                                                        Outcome s,
                                                        RatingScale scale) {
  if (!(sigma_i > 0.0) || !(sigma_j > 0.0))
    throw std::domain_error("single_surface: non-positive stdev");
  LogPosteriorProblem prob;
  prob.mu = Eigen::Vector2d(mu_i, mu_j);
  prob.sigma = Eigen::Vector2d(sigma_i * sigma_i, sigma_j * sigma_j).asDiagonal();
  prob.played = 0;
  prob.s_ij = s;
  prob.scale = scale;
  return prob;
}

LogPosteriorProblem LogPosteriorProblem::from_blocks(
    const Eigen::VectorXd& mu_i, const Eigen::VectorXd& mu_j,
    const Eigen::MatrixXd& lam_i, const Eigen::MatrixXd& lam_j, int played,
    Outcome s, RatingScale scale) {
  const Eigen::Index n = mu_i.size();
  if (mu_j.size() != n || lam_i.rows() != n || lam_i.cols() != n ||
      lam_j.rows() != n || lam_j.cols() != n)
    throw std::domain_error("from_blocks: dimension mismatch");
  for (const auto* lam : {&lam_i, &lam_j}) {
    Eigen::LLT<Eigen::MatrixXd> llt(*lam);
    if (llt.info() != Eigen::Success)
      throw std::domain_error("from_blocks: prior block not positive definite");
  }
  LogPosteriorProblem prob;
  prob.mu.resize(2 * n);
  prob.mu << mu_i, mu_j;
  prob.sigma = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  prob.sigma.topLeftCorner(n, n) = lam_i;
  prob.sigma.bottomRightCorner(n, n) = lam_j;
  prob.played = played;
  prob.s_ij = s;
  prob.scale = scale;
  check_problem(prob);
  return prob;
}

double log_posterior(const Eigen::VectorXd& theta,
                     const LogPosteriorProblem& prob) {
  check_problem(prob);
  if (theta.size() != prob.mu.size())
    throw std::domain_error("log_posterior: theta dimension mismatch");
  const int n = prob.surfaces();
  const Eigen::VectorXd r = theta - prob.mu;
  Eigen::LLT<Eigen::MatrixXd> llt(prob.sigma);
  if (llt.info() != Eigen::Success)
    throw std::domain_error("log_posterior: prior covariance not positive definite");
  const double quad = r.dot(llt.solve(r));
  const double x = prob.scale.b * (theta[prob.played] - theta[n + prob.played]);
  const double s = score(prob.s_ij);
  return -0.5 * quad + s * log_logistic(x) + (1.0 - s) * log_logistic(-x);
}

Eigen::VectorXd jacobian(const Eigen::VectorXd& theta,
                         const LogPosteriorProblem& prob) {
  check_problem(prob);
  const int n = prob.surfaces();
  Eigen::LLT<Eigen::MatrixXd> llt(prob.sigma);
  Eigen::VectorXd grad = -llt.solve(theta - prob.mu);
  const double x = prob.scale.b * (theta[prob.played] - theta[n + prob.played]);
  const double p_ij = logistic(x);
  const double s = score(prob.s_ij);
  // d/dtheta of the match term: nonzero only on the played coordinates.
  const double v = prob.scale.b * (s * (1.0 - p_ij) - (1.0 - s) * p_ij);
  grad[prob.played] += v;
  grad[n + prob.played] -= v;
  return grad;
}

Eigen::MatrixXd hessian(const Eigen::VectorXd& theta,
                        const LogPosteriorProblem& prob) {
  check_problem(prob);
  const int n = prob.surfaces();
  Eigen::LLT<Eigen::MatrixXd> llt(prob.sigma);
  Eigen::MatrixXd h = -llt.solve(Eigen::MatrixXd::Identity(2 * n, 2 * n));
  const double x = prob.scale.b * (theta[prob.played] - theta[n + prob.played]);
  const double p_ij = logistic(x);
  const double curv = prob.scale.b * prob.scale.b * p_ij * (1.0 - p_ij);
  h(prob.played, prob.played) -= curv;
  h(n + prob.played, n + prob.played) -= curv;
  h(prob.played, n + prob.played) += curv;
  h(n + prob.played, prob.played) += curv;
  return h;
}

namespace {

// Solves (-H) dx = J at theta; -H is positive definite whenever the prior
// covariance is.
Eigen::VectorXd newton_direction(const Eigen::VectorXd& theta,
                                 const LogPosteriorProblem& prob) {
  Eigen::MatrixXd neg_h = -hessian(theta, prob);
  Eigen::LLT<Eigen::MatrixXd> llt(neg_h);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("newton_direction: curvature factorization failed");
  return llt.solve(jacobian(theta, prob));
}

}  // namespace

JointPosteriorApprox newton_step(const LogPosteriorProblem& prob) {
  check_problem(prob);
  JointPosteriorApprox out;
  out.mu_prime = prob.mu + newton_direction(prob.mu, prob);
  Eigen::MatrixXd neg_h = -hessian(out.mu_prime, prob);
  Eigen::LLT<Eigen::MatrixXd> llt(neg_h);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("newton_step: curvature factorization failed");
  Eigen::MatrixXd cov =
      llt.solve(Eigen::MatrixXd::Identity(prob.mu.size(), prob.mu.size()));
  out.cov_prime = 0.5 * (cov + cov.transpose());  // exact symmetry
  return out;
}

Eigen::VectorXd posterior_mode(const LogPosteriorProblem& prob, double tol,
                               int max_iter) {
  check_problem(prob);
  Eigen::VectorXd theta = prob.mu;
  std::vector<double> grad_norms;
  for (int it = 0; it <= max_iter; ++it) {
    const double gnorm = jacobian(theta, prob).norm();
    grad_norms.push_back(gnorm);
    if (gnorm <= tol) return theta;
    if (it == max_iter) break;
    theta += newton_direction(theta, prob);
  }
  std::ostringstream msg;
  msg << "posterior_mode: gradient norm " << grad_norms.back()
      << " above tolerance " << tol << " after " << max_iter
      << " iterations; trace:";
  for (double g : grad_norms) msg << ' ' << g;
  throw std::runtime_error(msg.str());
}

namespace {

constexpr int kGaussOrder = 24;

// Gauss-Legendre nodes and weights on [-1, 1], computed once by Newton
// iteration on the Legendre recurrence.
const std::vector<std::pair<double, double>>& gauss_nodes() {
  static const std::vector<std::pair<double, double>> nodes = [] {
    std::vector<std::pair<double, double>> out(kGaussOrder);
    const int g = kGaussOrder;
    for (int i = 0; i < (g + 1) / 2; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (g + 0.5));
      double dp = 0.0;
      for (int step = 0; step < 100; ++step) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= g; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = g * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      out[i] = {x, w};
      out[g - 1 - i] = {-x, w};
    }
    return out;
  }();
  return nodes;
}

struct PanelSums {
  double s0 = 0, s1x = 0, s1y = 0, s2xx = 0, s2xy = 0, s2yy = 0;
};

PanelSums integrate_panel(const std::function<double(double, double)>& logd,
                          double shift, double cx, double cy, double x_lo,
                          double y_lo, double w, double h) {
  const auto& nodes = gauss_nodes();
  PanelSums sums;
  const double xm = x_lo + 0.5 * w, ym = y_lo + 0.5 * h;
  for (const auto& [nx, wx] : nodes) {
    const double x = xm + 0.5 * w * nx;
    const double tx = x - cx;
    for (const auto& [ny, wy] : nodes) {
      const double y = ym + 0.5 * h * ny;
      const double ty = y - cy;
      const double f =
          std::exp(logd(x, y) - shift) * (0.25 * w * h * wx * wy);
      sums.s0 += f;
      sums.s1x += f * tx;
      sums.s1y += f * ty;
      sums.s2xx += f * tx * tx;
      sums.s2xy += f * tx * ty;
      sums.s2yy += f * ty * ty;
    }
  }
  return sums;
}

}  // namespace

MomentEstimate moments_by_quadrature(
    const std::function<double(double, double)>& log_density,
    const Eigen::Vector2d& center, const Eigen::Vector2d& half_width,
    double target_rel, bool parallel) {
  if (!(half_width[0] > 0.0) || !(half_width[1] > 0.0))
    throw std::domain_error("moments_by_quadrature: non-positive half width");
  const double shift = log_density(center[0], center[1]);
  const double x0 = center[0] - half_width[0], y0 = center[1] - half_width[1];
  double prev_s0 = 0.0;
  bool have_prev = false;
  for (int panels : {8, 16, 32, 64, 128}) {
    const double w = 2.0 * half_width[0] / panels;
    const double h = 2.0 * half_width[1] / panels;
    std::vector<PanelSums> partial(panels * panels);
    // Each panel writes only its own slot, so the parallel sweep and the
    // serial reference accumulate identical terms in identical order.
    if (parallel) {
#pragma omp parallel for schedule(static)
      for (int idx = 0; idx < panels * panels; ++idx) {
        const int ix = idx % panels, iy = idx / panels;
        partial[idx] = integrate_panel(log_density, shift, center[0], center[1],
                                       x0 + ix * w, y0 + iy * h, w, h);
      }
    } else {
      for (int idx = 0; idx < panels * panels; ++idx) {
        const int ix = idx % panels, iy = idx / panels;
        partial[idx] = integrate_panel(log_density, shift, center[0], center[1],
                                       x0 + ix * w, y0 + iy * h, w, h);
      }
    }
    PanelSums total;
    for (const PanelSums& p : partial) {
      total.s0 += p.s0;
      total.s1x += p.s1x;
      total.s1y += p.s1y;
      total.s2xx += p.s2xx;
      total.s2xy += p.s2xy;
      total.s2yy += p.s2yy;
    }
    if (!(total.s0 > 0.0))
      throw std::runtime_error("moments_by_quadrature: vanishing mass");
    if (have_prev) {
      const double drift = std::abs(total.s0 - prev_s0) / total.s0;
      if (drift <= target_rel) {
        MomentEstimate est;
        const double mx = total.s1x / total.s0, my = total.s1y / total.s0;
        est.mean = Eigen::Vector2d(center[0] + mx, center[1] + my);
        est.cov.resize(2, 2);
        est.cov(0, 0) = total.s2xx / total.s0 - mx * mx;
        est.cov(0, 1) = total.s2xy / total.s0 - mx * my;
        est.cov(1, 0) = est.cov(0, 1);
        est.cov(1, 1) = total.s2yy / total.s0 - my * my;
        est.report = {panels, kGaussOrder, drift};
        return est;
      }
    }
    prev_s0 = total.s0;
    have_prev = true;
  }
  throw std::runtime_error(
      "moments_by_quadrature: zeroth moment did not stabilize to target");
}

MomentEstimate posterior_moments_numeric(const LogPosteriorProblem& prob,
                                         bool parallel, double target_rel) {
  check_problem(prob);
  if (prob.surfaces() != 1)
    throw std::invalid_argument(
        "posterior_moments_numeric: single-surface problems only");
  const Eigen::Vector2d center(prob.mu[0], prob.mu[1]);
  const Eigen::Vector2d half_width(10.0 * std::sqrt(prob.sigma(0, 0)),
                                   10.0 * std::sqrt(prob.sigma(1, 1)));
  auto logd = [&prob](double x, double y) {
    return log_posterior(Eigen::Vector2d(x, y), prob);
  };
  return moments_by_quadrature(logd, center, half_width, target_rel, parallel);
}

double relative_error(const Eigen::VectorXd& value,
                      const Eigen::VectorXd& reference) {
  const double ref = reference.norm();
  if (!(ref > 0.0)) throw std::domain_error("relative_error: zero reference");
  return (value - reference).norm() / ref;
}

double relative_error(const Eigen::MatrixXd& value,
                      const Eigen::MatrixXd& reference) {
  const double ref = reference.norm();  // Frobenius
  if (!(ref > 0.0)) throw std::domain_error("relative_error: zero reference");
  return (value - reference).norm() / ref;
}

}  // namespace ratekit
