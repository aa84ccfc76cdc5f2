#include "ratekit/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include "ratekit/core.hpp"

namespace ratekit {

namespace {

// splitmix64; fixed bit-for-bit output so regenerated corpora are
// byte-identical everywhere.
struct Rng {
  std::uint64_t state;
  std::uint64_t next_u64() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  int below(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }
  bool have_spare = false;
  double spare = 0.0;
  double normal() {
    if (have_spare) {
      have_spare = false;
      return spare;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare = r * std::sin(t);
    have_spare = true;
    return r * std::cos(t);
  }
};

constexpr int kSurfaces = 3;  // clay, grass, hard
const char* kSurfaceName[kSurfaces] = {"Clay", "Grass", "Hard"};

struct Player {
  int id = 0;
  int entry_year = 0;
  std::array<double, kSurfaces> theta{};  // latent strength right now
  double handicap = 0.0;                  // remaining early-career deficit
  double recovery = 0.0;                  // handicap regained per match
};

// Lower Cholesky factor of the latent cross-surface covariance.
struct Chol {
  std::array<std::array<double, kSurfaces>, kSurfaces> l{};
};

Chol latent_cholesky() {
  const double s[kSurfaces] = {130.0, 140.0, 110.0};
  double rho[kSurfaces][kSurfaces] = {
      {1.0, 0.45, 0.62}, {0.45, 1.0, 0.70}, {0.62, 0.70, 1.0}};
  Chol c;
  for (int i = 0; i < kSurfaces; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = s[i] * s[j] * rho[i][j];
      for (int k = 0; k < j; ++k) sum -= c.l[i][k] * c.l[j][k];
      c.l[i][j] = i == j ? std::sqrt(sum) : sum / c.l[j][j];
    }
  }
  return c;
}

std::string set_score(Rng& rng, bool winner_side) {
  const int loser_games = rng.below(5);
  return winner_side ? "6-" + std::to_string(loser_games)
                     : std::to_string(loser_games) + "-6";
}

std::string match_score(Rng& rng) {
  // Mostly straight sets, sometimes three.
  if (rng.uniform() < 0.72)
    return set_score(rng, true) + " " + set_score(rng, true);
  return set_score(rng, true) + " " + set_score(rng, false) + " 7-5";
}

}  // namespace

std::vector<std::filesystem::path> write_synthetic_corpus(
    const std::filesystem::path& dir, const SyntheticOptions& options) {
  std::filesystem::create_directories(dir);
  Rng rng{options.seed};
  const Chol chol = latent_cholesky();
  const RatingScale scale = RatingScale::standard();

  std::vector<Player> players(options.players);
  const int years = options.last_year - options.first_year + 1;
  for (int i = 0; i < options.players; ++i) {
    Player& p = players[i];
    p.id = 100001 + i;
    // A core pool is present from the start; the rest enter over time with
    // an early-career deficit they work off match by match.
    p.entry_year = i < options.players * 3 / 5
                       ? options.first_year
                       : options.first_year + rng.below(years);
    double z[kSurfaces];
    for (double& v : z) v = rng.normal();
    for (int s = 0; s < kSurfaces; ++s) {
      p.theta[s] = 1500.0;
      for (int k = 0; k <= s; ++k) p.theta[s] += chol.l[s][k] * z[k];
    }
    if (p.entry_year > options.first_year) {
      p.handicap = 80.0 + 160.0 * rng.uniform();
      p.recovery = 2.0 + 3.0 * rng.uniform();
    }
  }

  std::vector<std::filesystem::path> written;
  for (int year = options.first_year; year <= options.last_year; ++year) {
    const std::filesystem::path path =
        dir / ("atp_matches_" + std::to_string(year) + ".csv");
    std::ofstream out(path);
    out << "tourney_id,tourney_name,surface,draw_size,tourney_level,"
           "tourney_date,match_num,winner_id,winner_name,winner_hand,"
           "winner_age,loser_id,loser_name,loser_hand,loser_age,score,"
           "best_of,round,minutes\n";

    std::vector<int> active;
    for (int i = 0; i < options.players; ++i)
      if (players[i].entry_year <= year) active.push_back(i);

    for (int e = 0; e < options.events_per_year; ++e) {
      const int month = 1 + e * 12 / options.events_per_year;
      const int day = 1 + rng.below(26);
      const std::string tourney_id =
          std::to_string(year) + "-" + std::to_string(301 + e);
      int surface = [&] {
        const double u = rng.uniform();
        if (u < 0.55) return 2;  // hard
        if (u < 0.85) return 0;  // clay
        if (u < 0.97) return 1;  // grass
        return 3;                // carpet, filtered downstream
      }();
      // Carpet only survives the first three seasons; the opener of each of
      // those seasons is pinned to it so every corpus has a few such events.
      if (e == 0 && year <= options.first_year + 2) surface = 3;
      if (surface == 3 && year > options.first_year + 2) surface = 2;
      const char* surface_name =
          surface == 3 ? "Carpet" : kSurfaceName[surface];
      const int latent = surface == 3 ? 2 : surface;  // carpet plays hard

      const int draw = rng.uniform() < 0.6 ? 32 : 16;
      std::vector<int> field = active;
      for (int i = static_cast<int>(field.size()) - 1; i > 0; --i)
        std::swap(field[i], field[rng.below(i + 1)]);
      field.resize(std::min<std::size_t>(draw, field.size()));

      int match_num = 0;
      std::vector<int> round_players = field;
      while (round_players.size() >= 2) {
        std::vector<int> next_round;
        for (std::size_t m = 0; m + 1 < round_players.size(); m += 2) {
          Player& a = players[round_players[m]];
          Player& b = players[round_players[m + 1]];
          const double strength_a = a.theta[latent] - a.handicap;
          const double strength_b = b.theta[latent] - b.handicap;
          const double p_a = logistic(scale.b * (strength_a - strength_b));
          Player& winner = rng.uniform() < p_a ? a : b;
          Player& loser = &winner == &a ? b : a;
          next_round.push_back(winner.id - 100001);

          std::string score = match_score(rng);
          const double q = rng.uniform();
          if (q < 0.030) score = set_score(rng, true) + " 3-1 RET";
          else if (q < 0.036) score = "W/O";
          else if (q < 0.039) score = set_score(rng, true) + " 2-0 DEF";
          // A trickle of malformed rows exercises the parser's drop path.
          const bool blank_surface = rng.uniform() < 0.004;

          ++match_num;
          out << tourney_id << ",Synthetic Open " << tourney_id << ','
              << (blank_surface ? "" : surface_name) << ',' << draw << ",A,"
              << year * 10000 + month * 100 + day << ',' << match_num << ','
              << winner.id << ",Player " << winner.id << ','
              << (winner.id % 2 ? 'R' : 'L') << ','
              << 20 + winner.id % 16 << '.' << winner.id % 10 << ','
              << loser.id << ",Player " << loser.id << ','
              << (loser.id % 2 ? 'R' : 'L') << ',' << 20 + loser.id % 16
              << '.' << loser.id % 10 << ',' << score << ",3,R" << round_players.size()
              << ',' << 55 + rng.below(130) << '\n';

          for (Player* pl : {&winner, &loser}) {
            const double step = std::min(pl->handicap, pl->recovery);
            pl->handicap -= step;
            const double drift = 2.8 * rng.normal();
            for (double& t : pl->theta) t += drift;
          }
        }
        round_players = std::move(next_round);
      }
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace ratekit
