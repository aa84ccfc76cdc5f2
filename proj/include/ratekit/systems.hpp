#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include "ratekit/baselines.hpp"
#include "ratekit/ingest.hpp"
#include "ratekit/surface.hpp"
#include "ratekit/velo.hpp"

namespace ratekit {

enum class ModelKind { elo, glicko, velo, genelo, vgenelo };
ModelKind parse_model_kind(std::string_view name);  // throws on unknown name
std::string to_string(ModelKind kind);

struct EloConfig {
  double k = 32.0;
};

struct GlickoConfig {
  GlickoParams params;
};

struct VeloConfig {
  double sigma0 = 100.0;
  VeloParams params;
};

struct GenEloConfig {
  SurfaceCovariance cov;  // shared by all players
};

struct VGenEloConfig {
  Eigen::VectorXd sigma0;  // initial per-surface stdevs
  Eigen::MatrixXd rho;     // shared correlation matrix
  double variance_reduction = 1.0;
  double sigma_floor = 0.0;
};

using ModelConfig =
    std::variant<EloConfig, GlickoConfig, VeloConfig, GenEloConfig, VGenEloConfig>;

ModelKind kind_of(const ModelConfig& config);

// Builds a config from textual key=value parameters as accepted on the
// command line. Unknown keys, missing required keys and invalid values
// (including a correlation matrix that is not positive definite) throw.
//
//   elo      K
//   glicko   sigma0, c2, period (month|count), period_matches
//   velo     sigma0, A, B, eta_mode (L|sigma2|constant), alpha, eta
//   genelo   sigma_<surface>..., rho_<surface>_<surface>...
//   vgenelo  the genelo keys plus A and B
ModelConfig make_config(ModelKind kind,
                        const std::map<std::string, std::string>& params,
                        const SurfaceSet& surfaces = SurfaceSet::default_set());

std::string describe(const ModelConfig& config);

// Sequential forecaster: consumes matches in chronological order, returning
// the pre-match win probability of the recorded winner before folding the
// result into its state. Players initialize on first sight.
class RatingSystem {
 public:
  virtual ~RatingSystem() = default;
  virtual double process(const MatchRecord& match) = 0;
};

std::unique_ptr<RatingSystem> make_system(
    const ModelConfig& config, const SurfaceSet& surfaces = SurfaceSet::default_set());

}  // namespace ratekit
