#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace ratekit {

// Deterministic tour simulator. Players carry latent per-surface strengths
// drawn from a correlated prior; later entrants start below their eventual
// level and improve over their first matches, and everyone drifts by a
// correlated random walk. Outcomes are sampled from the paired-comparison
// model on the event surface. The emitted files follow the raw annual CSV
// schema, including off-court endings and a few carpet events and malformed
// rows so the ingestion filters have something to do.
struct SyntheticOptions {
  std::uint64_t seed = 7061;
  int first_year = 2010;
  int last_year = 2019;
  int players = 150;
  int events_per_year = 62;
};

// Writes atp_matches_<year>.csv into dir; returns the paths written.
std::vector<std::filesystem::path> write_synthetic_corpus(
    const std::filesystem::path& dir, const SyntheticOptions& options = {});

}  // namespace ratekit
