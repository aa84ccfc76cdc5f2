#include "ratekit/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace ratekit {

namespace {

bool predicted_winner(double p_winner, const MatchRecord& match) {
  if (p_winner != 0.5) return p_winner > 0.5;
  return match.winner_id < match.loser_id;
}

double clamped_neg_log(double p) {
  return -std::log(std::clamp(p, 1e-15, 1.0 - 1e-15));
}

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

}  // namespace

std::vector<std::uint8_t> BacktestReport::correct_flags() const {
  std::vector<std::uint8_t> flags;
  flags.reserve(per_match.size());
  for (const MatchScore& m : per_match) flags.push_back(m.correct ? 1 : 0);
  return flags;
}

BacktestReport backtest(const ModelConfig& config, const Dataset& dataset,
                        const SurfaceSet& surfaces) {
  const auto system = make_system(config, surfaces);
  for (const MatchRecord& match : dataset.train) system->process(match);
  BacktestReport report;
  report.per_match.reserve(dataset.test.size());
  double nll = 0.0;
  long correct = 0;
  for (const MatchRecord& match : dataset.test) {
    const double p = system->process(match);
    MatchScore score;
    score.date = match.date;
    score.winner_id = match.winner_id;
    score.loser_id = match.loser_id;
    score.surface = match.surface;
    score.p_winner = p;
    score.correct = predicted_winner(p, match);
    score.residual = 1.0 - p;
    if (score.correct) ++correct;
    nll += clamped_neg_log(p);
    report.per_match.push_back(std::move(score));
  }
  if (!report.per_match.empty()) {
    report.accuracy =
        static_cast<double>(correct) / static_cast<double>(report.per_match.size());
    report.avg_neg_loglike = nll / static_cast<double>(report.per_match.size());
  }
  return report;
}

McNemarResult mcnemar_one_sided(std::span<const std::uint8_t> flags1,
                                std::span<const std::uint8_t> flags2) {
  if (flags1.size() != flags2.size())
    throw std::invalid_argument("mcnemar_one_sided: length mismatch");
  McNemarResult result;
  for (std::size_t i = 0; i < flags1.size(); ++i) {
    if (flags1[i] && !flags2[i]) ++result.n12;
    if (!flags1[i] && flags2[i]) ++result.n21;
  }
  const long discordant = result.n12 + result.n21;
  if (discordant > 0) {
    const double z = static_cast<double>(result.n21 - result.n12) /
                     std::sqrt(static_cast<double>(discordant));
    result.z = z;
    result.p_value = 1.0 - normal_cdf(z);
  }
  return result;
}

NewPlayerCounts new_player_analysis(const ModelConfig& constant_config,
                                    const ModelConfig& variance_config,
                                    std::span<const MatchRecord> matches,
                                    int warmup, int window,
                                    const SurfaceSet& surfaces) {
  if (warmup < 0 || window <= 0)
    throw std::invalid_argument("new_player_analysis: bad warmup or window");
  // Both models see the identical sequence; flags are per match.
  std::vector<std::uint8_t> flags_constant, flags_variance;
  for (const ModelConfig* config : {&constant_config, &variance_config}) {
    const auto system = make_system(*config, surfaces);
    std::vector<std::uint8_t> flags;
    flags.reserve(matches.size());
    for (const MatchRecord& match : matches)
      flags.push_back(predicted_winner(system->process(match), match) ? 1 : 0);
    (config == &constant_config ? flags_constant : flags_variance) =
        std::move(flags);
  }
  std::map<std::string, std::vector<std::size_t>> appearances;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    appearances[matches[i].winner_id].push_back(i);
    appearances[matches[i].loser_id].push_back(i);
  }
  NewPlayerCounts counts;
  for (const auto& [id, where] : appearances) {
    if (where.front() < static_cast<std::size_t>(warmup)) continue;
    if (where.size() < static_cast<std::size_t>(window)) continue;
    int hits_constant = 0, hits_variance = 0;
    for (int k = 0; k < window; ++k) {
      hits_constant += flags_constant[where[k]];
      hits_variance += flags_variance[where[k]];
    }
    ++counts.total;
    if (hits_constant > hits_variance)
      ++counts.better_constant;
    else if (hits_variance > hits_constant)
      ++counts.better_variance;
    else
      ++counts.tied;
  }
  return counts;
}

std::vector<ResidualPoint> player_residuals(const ModelConfig& config,
                                            std::span<const MatchRecord> matches,
                                            const std::string& player_id,
                                            const SurfaceSet& surfaces) {
  const auto system = make_system(config, surfaces);
  std::vector<ResidualPoint> points;
  for (const MatchRecord& match : matches) {
    const double p_winner = system->process(match);
    const bool won = match.winner_id == player_id;
    if (!won && match.loser_id != player_id) continue;
    ResidualPoint point;
    point.index = static_cast<int>(points.size()) + 1;
    point.date = match.date;
    point.opponent_id = won ? match.loser_id : match.winner_id;
    point.surface = match.surface;
    point.score = won ? 1.0 : 0.0;
    point.p_hat = won ? p_winner : 1.0 - p_winner;
    point.residual = point.score - point.p_hat;
    points.push_back(std::move(point));
  }
  if (points.empty())
    throw std::invalid_argument("player_residuals: unknown player " + player_id);
  return points;
}

Dataset surface_restrict(const Dataset& dataset, const std::string& surface) {
  if (SurfaceSet::default_set().index_of(surface) < 0)
    throw std::invalid_argument("surface_restrict: unknown surface " + surface);
  Dataset out;
  for (const MatchRecord& match : dataset.train)
    if (match.surface == surface) out.train.push_back(match);
  for (const MatchRecord& match : dataset.test)
    if (match.surface == surface) out.test.push_back(match);
  out.summary = summarize(out.train, out.test);
  return out;
}

}  // namespace ratekit
