#include "ratekit/report.hpp"

#include <array>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace ratekit {

const std::vector<TrajectoryPanel>& trajectory_reference() {
  static const std::vector<TrajectoryPanel> panels = {
      {100.0,
       {{0, 200.0, 138.5, false},  // gain here reflects the other panel
        {25, 68.00, 23.7, true},
        {50, 49.54, 12.8, true},
        {100, 35.58, 6.7, true},
        {150, 29.20, 4.5, true},
        {200, 25.36, 3.4, true},
        {300, 20.76, 2.3, true},
        {400, 18.00, 1.7, true},
        {500, 16.12, 1.4, true}}},
      {200.0,
       {{0, 200.0, 138.5, true},
        {25, 74.42, 23.1, true},
        {50, 54.55, 12.6, true},
        {100, 39.31, 6.6, true},
        {150, 32.30, 4.5, true},
        {200, 28.07, 3.4, true},
        {300, 22.99, 2.3, true},
        {400, 19.94, 1.7, true},
        {500, 17.86, 1.4, true}}}};
  return panels;
}

namespace {

std::string full_precision(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<int> reference_checkpoints(const TrajectoryPanel& panel) {
  std::vector<int> out;
  for (const TrajectoryCheck& row : panel.rows) out.push_back(row.matches);
  return out;
}

}  // namespace

std::string trajectory_csv(double sigma_j) {
  for (const TrajectoryPanel& panel : trajectory_reference()) {
    if (panel.sigma_j != sigma_j) continue;
    const std::vector<int> checkpoints = reference_checkpoints(panel);
    const auto rows =
        pinned_variance_trajectory(200.0, sigma_j, checkpoints);
    std::ostringstream out;
    out << "matches,shrink_fraction,sigma,k\n";
    for (const PinnedTrajectoryRow& row : rows) {
      out << row.matches << ',' << full_precision(row.l) << ','
          << full_precision(row.sigma) << ',' << full_precision(row.k) << '\n';
    }
    return out.str();
  }
  throw std::invalid_argument("trajectory_csv: no reference panel for sigma_j");
}

std::vector<SingleMatchAccuracyCell> single_match_accuracy_grid(bool parallel) {
  const std::array<std::pair<double, double>, 3> means = {
      {{1500.0, 1500.0}, {1500.0, 1800.0}, {1500.0, 2000.0}}};
  const std::array<std::pair<double, double>, 2> stdevs = {
      {{50.0, 50.0}, {50.0, 80.0}}};
  std::vector<SingleMatchAccuracyCell> cells;
  for (const auto& [mu1, mu2] : means) {
    for (const auto& [sigma1, sigma2] : stdevs) {
      const LogPosteriorProblem prob = LogPosteriorProblem::single_surface(
          mu1, mu2, sigma1, sigma2, Outcome::win);
      const MomentEstimate exact = posterior_moments_numeric(prob, parallel);
      const JointPosteriorApprox step = newton_step(prob);
      const Eigen::VectorXd mode = posterior_mode(prob);
      Eigen::MatrixXd neg_h = -hessian(mode, prob);
      const Eigen::MatrixXd mode_cov =
          neg_h.llt().solve(Eigen::MatrixXd::Identity(2, 2));
      SingleMatchAccuracyCell cell;
      cell.mu1 = mu1;
      cell.mu2 = mu2;
      cell.sigma1 = sigma1;
      cell.sigma2 = sigma2;
      cell.re_mode_mean = relative_error(mode, exact.mean);
      cell.re_mode_cov = relative_error(mode_cov, exact.cov);
      cell.re_step_mean = relative_error(step.mu_prime, exact.mean);
      cell.re_step_cov = relative_error(step.cov_prime, exact.cov);
      cell.quadrature = exact.report;
      cells.push_back(cell);
    }
  }
  return cells;
}

const std::vector<SingleMatchAccuracyRef>& single_match_accuracy_reference() {
  // Error levels confirmed against independent oracles (a one-dimensional
  // transcription of the equal-ratings posterior and dense linear algebra);
  // regressions are caught by requiring new measurements within a factor of
  // two of these.
  static const std::vector<SingleMatchAccuracyRef> refs = {
      {1500, 1500, 50, 50, 6.8e-06, 1.0e-03, 6.9e-06, 1.0e-03},
      {1500, 1500, 50, 80, 3.7e-05, 3.1e-03, 3.7e-05, 3.1e-03},
      {1500, 1800, 50, 50, 6.2e-05, 1.4e-04, 7.0e-05, 1.4e-04},
      {1500, 1800, 50, 80, 2.1e-04, 1.1e-04, 2.5e-04, 9.1e-05},
      {1500, 2000, 50, 50, 3.4e-05, 3.4e-04, 3.9e-05, 3.4e-04},
      {1500, 2000, 50, 80, 1.3e-04, 1.1e-03, 1.6e-04, 1.1e-03}};
  return refs;
}

std::string single_match_accuracy_csv(
    const std::vector<SingleMatchAccuracyCell>& cells) {
  std::ostringstream out;
  out << "mu1,mu2,sigma1,sigma2,re_mode_mean,re_mode_cov,re_step_mean,"
         "re_step_cov,quadrature_panels,quadrature_drift\n";
  for (const SingleMatchAccuracyCell& cell : cells) {
    out << cell.mu1 << ',' << cell.mu2 << ',' << cell.sigma1 << ','
        << cell.sigma2 << ',' << full_precision(cell.re_mode_mean) << ','
        << full_precision(cell.re_mode_cov) << ','
        << full_precision(cell.re_step_mean) << ','
        << full_precision(cell.re_step_cov) << ','
        << cell.quadrature.panels_per_axis << ','
        << full_precision(cell.quadrature.zeroth_moment_drift) << '\n';
  }
  return out.str();
}

}  // namespace ratekit
