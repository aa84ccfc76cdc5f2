#include "ratekit/systems.hpp"

#include <charconv>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace ratekit {

ModelKind parse_model_kind(std::string_view name) {
  if (name == "elo") return ModelKind::elo;
  if (name == "glicko") return ModelKind::glicko;
  if (name == "velo") return ModelKind::velo;
  if (name == "genelo") return ModelKind::genelo;
  if (name == "vgenelo") return ModelKind::vgenelo;
  throw std::invalid_argument("unknown model: " + std::string(name));
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::elo: return "elo";
    case ModelKind::glicko: return "glicko";
    case ModelKind::velo: return "velo";
    case ModelKind::genelo: return "genelo";
    case ModelKind::vgenelo: return "vgenelo";
  }
  return "?";
}

ModelKind kind_of(const ModelConfig& config) {
  return static_cast<ModelKind>(config.index());
}

namespace {

class ParamReader {
 public:
  ParamReader(const std::map<std::string, std::string>& params,
              std::string context)
      : params_(params), context_(std::move(context)) {}

  double number(const std::string& key, double fallback) {
    const auto it = params_.find(key);
    if (it == params_.end()) return fallback;
    used_.insert(key);
    double out = 0.0;
    const std::string& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw std::invalid_argument(context_ + ": bad number for " + key + ": " + s);
    return out;
  }

  double required_number(const std::string& key) {
    if (!params_.contains(key))
      throw std::invalid_argument(context_ + ": missing parameter " + key);
    return number(key, 0.0);
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const auto it = params_.find(key);
    if (it == params_.end()) return fallback;
    used_.insert(key);
    return it->second;
  }

  void finish() const {
    for (const auto& [key, value] : params_)
      if (!used_.contains(key))
        throw std::invalid_argument(context_ + ": unknown parameter " + key);
  }

 private:
  const std::map<std::string, std::string>& params_;
  std::string context_;
  std::set<std::string> used_;
};

SurfaceCovariance read_covariance(ParamReader& reader,
                                  const SurfaceSet& surfaces) {
  const int n = surfaces.size();
  SurfaceCovariance cov;
  cov.sigma.resize(n);
  cov.rho = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    cov.sigma[i] = reader.required_number("sigma_" + surfaces.names[i]);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double r = reader.required_number("rho_" + surfaces.names[i] + "_" +
                                              surfaces.names[j]);
      cov.rho(i, j) = r;
      cov.rho(j, i) = r;
    }
  }
  cov.validate();
  return cov;
}

}  // namespace

ModelConfig make_config(ModelKind kind,
                        const std::map<std::string, std::string>& params,
                        const SurfaceSet& surfaces) {
  ParamReader reader(params, to_string(kind));
  switch (kind) {
    case ModelKind::elo: {
      EloConfig config;
      config.k = reader.number("K", config.k);
      if (!(config.k > 0.0)) throw std::domain_error("elo: K must be positive");
      reader.finish();
      return config;
    }
    case ModelKind::glicko: {
      GlickoConfig config;
      const double sigma0 = reader.number("sigma0", 350.0);
      if (!(sigma0 > 0.0))
        throw std::domain_error("glicko: sigma0 must be positive");
      config.params.sigma0_2 = sigma0 * sigma0;
      config.params.c2 = reader.number("c2", 0.0);
      if (config.params.c2 < 0.0)
        throw std::domain_error("glicko: c2 must be non-negative");
      const std::string period = reader.text("period", "month");
      if (period == "month") {
        config.params.period = PeriodRule::calendar_month;
      } else if (period == "count") {
        config.params.period = PeriodRule::match_count;
      } else {
        throw std::invalid_argument("glicko: period must be month or count");
      }
      config.params.matches_per_period =
          static_cast<int>(reader.number("period_matches", 200.0));
      if (config.params.matches_per_period <= 0)
        throw std::domain_error("glicko: period_matches must be positive");
      reader.finish();
      return config;
    }
    case ModelKind::velo: {
      VeloConfig config;
      config.sigma0 = reader.number("sigma0", config.sigma0);
      if (!(config.sigma0 > 0.0))
        throw std::domain_error("velo: sigma0 must be positive");
      config.params.variance_reduction = reader.number("A", 1.0);
      if (config.params.variance_reduction < 0.0 ||
          config.params.variance_reduction > 1.0)
        throw std::domain_error("velo: A must lie in [0, 1]");
      config.params.sigma_floor = reader.number("B", 0.0);
      if (config.params.sigma_floor < 0.0)
        throw std::domain_error("velo: B must be non-negative");
      const std::string mode = reader.text("eta_mode", "L");
      if (mode == "L") {
        config.params.eta_mode = EtaMode::proportional_to_l;
      } else if (mode == "sigma2") {
        config.params.eta_mode = EtaMode::proportional_to_sigma2;
      } else if (mode == "constant") {
        config.params.eta_mode = EtaMode::constant;
      } else {
        throw std::invalid_argument("velo: eta_mode must be L, sigma2 or constant");
      }
      config.params.alpha = reader.number("alpha", 0.0);
      config.params.eta = reader.number("eta", 0.0);
      reader.finish();
      return config;
    }
    case ModelKind::genelo: {
      GenEloConfig config;
      config.cov = read_covariance(reader, surfaces);
      reader.finish();
      return config;
    }
    case ModelKind::vgenelo: {
      VGenEloConfig config;
      const SurfaceCovariance cov = read_covariance(reader, surfaces);
      config.sigma0 = cov.sigma;
      config.rho = cov.rho;
      config.variance_reduction = reader.number("A", 1.0);
      if (config.variance_reduction < 0.0 || config.variance_reduction > 1.0)
        throw std::domain_error("vgenelo: A must lie in [0, 1]");
      config.sigma_floor = reader.number("B", 0.0);
      if (config.sigma_floor < 0.0)
        throw std::domain_error("vgenelo: B must be non-negative");
      reader.finish();
      return config;
    }
  }
  throw std::logic_error("make_config: bad model kind");
}

std::string describe(const ModelConfig& config) {
  std::ostringstream out;
  out << to_string(kind_of(config));
  if (const auto* c = std::get_if<EloConfig>(&config)) {
    out << " K=" << c->k;
  } else if (const auto* c = std::get_if<GlickoConfig>(&config)) {
    out << " sigma0_2=" << c->params.sigma0_2 << " c2=" << c->params.c2;
  } else if (const auto* c = std::get_if<VeloConfig>(&config)) {
    out << " sigma0=" << c->sigma0 << " A=" << c->params.variance_reduction
        << " B=" << c->params.sigma_floor;
  } else if (const auto* c = std::get_if<GenEloConfig>(&config)) {
    out << " sigma=[" << c->cov.sigma.transpose() << "]";
  } else if (const auto* c = std::get_if<VGenEloConfig>(&config)) {
    out << " sigma0=[" << c->sigma0.transpose() << "] A=" << c->variance_reduction
        << " B=" << c->sigma_floor;
  }
  return out.str();
}

namespace {

class EloSystem final : public RatingSystem {
 public:
  explicit EloSystem(const EloConfig& config) : k_(config.k) {}
  double process(const MatchRecord& match) override {
    PlayerState& w = state(match.winner_id);
    PlayerState& l = state(match.loser_id);
    const double p = win_probability(w.mu, l.mu);
    auto [nw, nl] = elo_update(w, l, Outcome::win, k_);
    w = nw;
    l = nl;
    return p;
  }

 private:
  PlayerState& state(const std::string& id) {
    return states_.try_emplace(id, PlayerState{1500.0, 1.0}).first->second;
  }
  double k_;
  std::unordered_map<std::string, PlayerState> states_;
};

class GlickoSystem final : public RatingSystem {
 public:
  explicit GlickoSystem(const GlickoConfig& config) : params_(config.params) {}

  double process(const MatchRecord& match) override {
    if (boundary_crossed(match)) flush();
    if (!have_period_) {
      period_year_ = match.date.year;
      period_month_ = match.date.month;
      have_period_ = true;
    }
    const double p = glicko_forecast(state(match.winner_id), state(match.loser_id));
    pending_.push_back(match);
    return p;
  }

 private:
  bool boundary_crossed(const MatchRecord& match) const {
    if (!have_period_) return false;
    if (params_.period == PeriodRule::match_count)
      return static_cast<int>(pending_.size()) >= params_.matches_per_period;
    return match.date.year != period_year_ || match.date.month != period_month_;
  }

  // Applies the buffered period simultaneously: every update reads the
  // start-of-period states, and idle players only gain variance.
  void flush() {
    std::map<std::string, std::vector<std::pair<PlayerState, Outcome>>> faced;
    for (const MatchRecord& match : pending_) {
      faced[match.winner_id].emplace_back(state(match.loser_id), Outcome::win);
      faced[match.loser_id].emplace_back(state(match.winner_id), Outcome::loss);
    }
    std::map<std::string, PlayerState> updated;
    for (const auto& [id, opponents] : faced)
      updated[id] = glicko_period_update(states_.at(id), opponents, params_);
    for (auto& [id, st] : states_) {
      if (const auto it = updated.find(id); it != updated.end())
        st = it->second;
      else
        st.sigma2 += params_.c2;
    }
    pending_.clear();
    have_period_ = false;
  }

  PlayerState& state(const std::string& id) {
    return states_.try_emplace(id, PlayerState{1500.0, params_.sigma0_2})
        .first->second;
  }

  GlickoParams params_;
  std::unordered_map<std::string, PlayerState> states_;
  std::vector<MatchRecord> pending_;
  bool have_period_ = false;
  int period_year_ = 0;
  int period_month_ = 0;
};

class VeloSystem final : public RatingSystem {
 public:
  explicit VeloSystem(const VeloConfig& config)
      : sigma0_(config.sigma0), params_(config.params) {}
  double process(const MatchRecord& match) override {
    PlayerState& w = state(match.winner_id);
    PlayerState& l = state(match.loser_id);
    const double p = win_probability(w.mu, l.mu, params_.scale);
    auto [nw, nl] = velo_update(w, l, 1, params_);
    w = nw;
    l = nl;
    return p;
  }

 private:
  PlayerState& state(const std::string& id) {
    return states_.try_emplace(id, initial_state(sigma0_)).first->second;
  }
  double sigma0_;
  VeloParams params_;
  std::unordered_map<std::string, PlayerState> states_;
};

class GenEloSystem final : public RatingSystem {
 public:
  GenEloSystem(const GenEloConfig& config, const SurfaceSet& surfaces)
      : cov_(config.cov), surfaces_(surfaces) {
    cov_.validate();
  }
  double process(const MatchRecord& match) override {
    const int m = surface_index(match, surfaces_);
    Eigen::VectorXd& w = state(match.winner_id);
    Eigen::VectorXd& l = state(match.loser_id);
    const double p = win_probability(w[m], l[m]);
    auto [nw, nl] = genelo_update(w, l, 1, cov_, m);
    w = std::move(nw);
    l = std::move(nl);
    return p;
  }

  static int surface_index(const MatchRecord& match, const SurfaceSet& surfaces) {
    const int m = surfaces.index_of(match.surface);
    if (m < 0)
      throw std::runtime_error("rating system: unknown surface " + match.surface);
    return m;
  }

 private:
  Eigen::VectorXd& state(const std::string& id) {
    const auto it = states_.find(id);
    if (it != states_.end()) return it->second;
    return states_
        .emplace(id, Eigen::VectorXd::Constant(surfaces_.size(), 1500.0))
        .first->second;
  }
  SurfaceCovariance cov_;
  SurfaceSet surfaces_;
  std::unordered_map<std::string, Eigen::VectorXd> states_;
};

class VGenEloSystem final : public RatingSystem {
 public:
  VGenEloSystem(const VGenEloConfig& config, const SurfaceSet& surfaces)
      : sigma0_(config.sigma0), rho_(config.rho), surfaces_(surfaces) {
    params_.variance_reduction = config.variance_reduction;
    params_.sigma_floor = config.sigma_floor;
  }
  double process(const MatchRecord& match) override {
    const int m = GenEloSystem::surface_index(match, surfaces_);
    SurfacePlayerState& w = state(match.winner_id);
    SurfacePlayerState& l = state(match.loser_id);
    const double p = win_probability(w.mu[m], l.mu[m], params_.scale);
    auto [nw, nl] = vgenelo_update(w, l, 1, rho_, m, params_);
    w = std::move(nw);
    l = std::move(nl);
    return p;
  }

 private:
  SurfacePlayerState& state(const std::string& id) {
    const auto it = states_.find(id);
    if (it != states_.end()) return it->second;
    return states_.emplace(id, initial_surface_state(sigma0_)).first->second;
  }
  Eigen::VectorXd sigma0_;
  Eigen::MatrixXd rho_;
  VeloParams params_;
  SurfaceSet surfaces_;
  std::unordered_map<std::string, SurfacePlayerState> states_;
};

}  // namespace

std::unique_ptr<RatingSystem> make_system(const ModelConfig& config,
                                          const SurfaceSet& surfaces) {
  if (const auto* c = std::get_if<EloConfig>(&config))
    return std::make_unique<EloSystem>(*c);
  if (const auto* c = std::get_if<GlickoConfig>(&config))
    return std::make_unique<GlickoSystem>(*c);
  if (const auto* c = std::get_if<VeloConfig>(&config))
    return std::make_unique<VeloSystem>(*c);
  if (const auto* c = std::get_if<GenEloConfig>(&config))
    return std::make_unique<GenEloSystem>(*c, surfaces);
  if (const auto* c = std::get_if<VGenEloConfig>(&config))
    return std::make_unique<VGenEloSystem>(*c, surfaces);
  throw std::logic_error("make_system: bad config");
}

}  // namespace ratekit
