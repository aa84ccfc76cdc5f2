#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ratekit/ingest.hpp"
#include "ratekit/systems.hpp"

namespace ratekit {

// Average one-match negative log-likelihood of the recorded winners under
// sequential forecasting from a fresh system. Probabilities are clamped to
// [1e-15, 1 - 1e-15] before the log. Deterministic; bit-identical across
// runs on the same input.
double avg_neg_loglike(const ModelConfig& config,
                       std::span<const MatchRecord> matches,
                       const SurfaceSet& surfaces = SurfaceSet::default_set());

struct ParamAxis {
  std::string name;
  std::vector<double> values;
};

struct ParamSpace {
  ModelKind model = ModelKind::velo;
  std::vector<ParamAxis> axes;               // searched parameters
  std::map<std::string, std::string> fixed;  // parameters held fixed
  // Simplex refinement from the best grid seeds; used for the
  // six-parameter surface searches where the grid alone is too coarse.
  bool refine = false;
  int refine_seeds = 10;
  double refine_tol = 1e-3;  // scaled simplex diameter
  int refine_max_iter = 400;
  std::map<std::string, std::pair<double, double>> bounds;  // refinement box
};

struct FitEvaluation {
  std::vector<double> values;  // aligned with FitResult::param_names
  double neg_loglike = 0.0;
};

struct FitResult {
  std::vector<std::string> param_names;  // sorted axis names
  std::map<std::string, double> best_params;
  double train_avg_neg_loglike = 0.0;
  // Every valid grid point exactly once, in enumeration order, followed by
  // any refinement evaluations.
  std::vector<FitEvaluation> evaluation_log;
  std::size_t grid_evaluations = 0;  // prefix of evaluation_log from the grid
  int rejected_grid_points = 0;      // invalid combinations (e.g. non-PD rho)
};

enum class Execution { serial, parallel };

// Minimizes avg_neg_loglike over the parameter grid (cartesian product of
// the axes), optionally refining from the best seeds. Ties break toward
// the lexicographically smallest parameter tuple. The two execution modes
// produce identical results; parallel distributes grid points and seeds
// over OpenMP threads.
FitResult fit(const ParamSpace& space, std::span<const MatchRecord> train,
              Execution exec = Execution::parallel,
              const SurfaceSet& surfaces = SurfaceSet::default_set());

}  // namespace ratekit
