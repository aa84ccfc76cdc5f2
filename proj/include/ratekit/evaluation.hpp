#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ratekit/ingest.hpp"
#include "ratekit/systems.hpp"

namespace ratekit {

struct MatchScore {
  Date date;
  std::string winner_id;
  std::string loser_id;
  std::string surface;
  double p_winner = 0.0;  // pre-match probability of the recorded winner
  bool correct = false;
  double residual = 0.0;  // 1 - p_winner
};

struct BacktestReport {
  double accuracy = 0.0;         // over the test split
  double avg_neg_loglike = 0.0;  // over the test split, clamped logs
  std::vector<MatchScore> per_match;
  std::vector<std::uint8_t> correct_flags() const;
};

// Runs the model over the training split to build state (no scoring), then
// scores every test match with its pre-match probability. A probability of
// exactly 1/2 predicts the lexicographically smaller player id.
BacktestReport backtest(const ModelConfig& config, const Dataset& dataset,
                        const SurfaceSet& surfaces = SurfaceSet::default_set());

struct McNemarResult {
  long n12 = 0;  // first model correct, second wrong
  long n21 = 0;  // second model correct, first wrong
  std::optional<double> z;        // empty when no discordant pairs exist
  std::optional<double> p_value;  // one-sided, small when the second is better
};

// Paired comparison of two per-match correctness sequences over the same
// matches. Positive z favors the second model.
McNemarResult mcnemar_one_sided(std::span<const std::uint8_t> flags1,
                                std::span<const std::uint8_t> flags2);

struct NewPlayerCounts {
  int better_constant = 0;  // constant-variance model strictly more accurate
  int better_variance = 0;  // variance-updating model strictly more accurate
  int tied = 0;
  int total = 0;  // cohort size
};

// Runs both models over the full match sequence; players first seen after
// `warmup` matches form the cohort, restricted to those with at least
// `window` appearances, and each is scored on the accuracy over their first
// `window` matches under each model.
NewPlayerCounts new_player_analysis(
    const ModelConfig& constant_config, const ModelConfig& variance_config,
    std::span<const MatchRecord> matches, int warmup = 5000, int window = 20,
    const SurfaceSet& surfaces = SurfaceSet::default_set());

struct ResidualPoint {
  int index = 0;  // 1-based position in the player's match sequence
  Date date;
  std::string opponent_id;
  std::string surface;
  double score = 0.0;  // 1 on a win, 0 on a loss
  double p_hat = 0.0;  // pre-match probability that the player wins
  double residual = 0.0;  // score - p_hat, in (-1, 1)
};

// Forecast residuals from one player's perspective over the full sequence.
// Unknown player id is an error.
std::vector<ResidualPoint> player_residuals(
    const ModelConfig& config, std::span<const MatchRecord> matches,
    const std::string& player_id,
    const SurfaceSet& surfaces = SurfaceSet::default_set());

// Restriction of both splits to one surface, order preserved. Unknown
// surface label is an error; empty results are allowed.
Dataset surface_restrict(const Dataset& dataset, const std::string& surface);

}  // namespace ratekit
