#pragma once

#include <string>
#include <vector>

#include "ratekit/laplace.hpp"
#include "ratekit/velo.hpp"

namespace ratekit {

// Published reference values for the pinned-probability variance-decay
// trajectory (initial stdev 200 against two opponent settings). The gain at
// match 0 in the sigma_j = 100 panel is inconsistent with that panel's own
// recursion (it corresponds to sigma_j = 200) and is excluded from checks.
struct TrajectoryCheck {
  int matches;
  double sigma_ref;
  double k_ref;
  bool check_k;
};
struct TrajectoryPanel {
  double sigma_j;
  std::vector<TrajectoryCheck> rows;
};
const std::vector<TrajectoryPanel>& trajectory_reference();

std::string trajectory_csv(double sigma_j);

// Accuracy of the two posterior approximations for a single win across a
// grid of prior settings, measured against numeric integration: the full
// mode search against the one-step update, errors relative to the exact
// posterior mean and covariance.
struct SingleMatchAccuracyCell {
  double mu1, mu2, sigma1, sigma2;
  double re_mode_mean, re_mode_cov;
  double re_step_mean, re_step_cov;
  QuadratureReport quadrature;
};
std::vector<SingleMatchAccuracyCell> single_match_accuracy_grid(
    bool parallel = true);

struct SingleMatchAccuracyRef {
  double mu1, mu2, sigma1, sigma2;
  double mode_mean, mode_cov, step_mean, step_cov;
};
const std::vector<SingleMatchAccuracyRef>& single_match_accuracy_reference();

std::string single_match_accuracy_csv(
    const std::vector<SingleMatchAccuracyCell>& cells);

}  // namespace ratekit
