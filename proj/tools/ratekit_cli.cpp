// Command-line front end: ingestion, fitting, backtesting, paired model
// comparison, and the diagnostic reports, wired to the library. Exit codes:
// 0 success, 1 stage error (stderr gets "stage: message"), 2 usage.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ratekit/config.hpp"
#include "ratekit/evaluation.hpp"
#include "ratekit/fitting.hpp"
#include "ratekit/ingest.hpp"
#include "ratekit/report.hpp"
#include "ratekit/systems.hpp"

namespace fs = std::filesystem;
using ratekit::RunConfig;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

// Inputs may be raw annual files or the normalized form written by `ingest`;
// dispatch on the header. Raw rows pass through the off-court/carpet filter,
// normalized ones are taken as already filtered.
std::vector<ratekit::MatchRecord> load_matches(
    const std::vector<std::string>& paths) {
  if (paths.empty()) throw std::runtime_error("no match files given");
  std::vector<fs::path> raw;
  std::vector<ratekit::MatchRecord> records;
  for (const std::string& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string header;
    std::getline(in, header);
    if (header.rfind("date,tourney_id,", 0) == 0) {
      in.seekg(0);
      auto part = ratekit::read_canonical_csv(in);
      records.insert(records.end(), part.begin(), part.end());
    } else {
      raw.emplace_back(path);
    }
  }
  if (!raw.empty()) {
    ratekit::ParseResult parsed = ratekit::parse_matches(raw);
    if (parsed.dropped_rows > 0)
      std::fprintf(stderr, "note: dropped %d unparseable row(s)\n",
                   parsed.dropped_rows);
    auto kept = ratekit::filter_matches(std::move(parsed.records));
    records.insert(records.end(), kept.begin(), kept.end());
  }
  std::sort(records.begin(), records.end(), ratekit::match_order);
  return records;
}

// Shared flag bundle: most subcommands need a model, its parameters and the
// input stream; the split commands add year ranges. Values resolve as
// command line > config file > built-in default.
struct Common {
  std::string config_path;
  std::vector<std::string> matches;
  std::string model = "velo";
  std::string params;
  std::string params_file;
  std::string train_years;
  std::string test_years;
  std::string surface;

  CLI::Option* model_opt = nullptr;
  CLI::Option* params_opt = nullptr;
  CLI::Option* matches_opt = nullptr;
  CLI::Option* train_opt = nullptr;
  CLI::Option* test_opt = nullptr;

  void attach(CLI::App* cmd, bool with_split) {
    cmd->add_option("--config", config_path, "settings file (key = value)");
    matches_opt = cmd->add_option("--matches", matches,
                                  "raw annual or normalized CSV files");
    model_opt = cmd->add_option("--model", model,
                                "elo, glicko, velo, genelo or vgenelo");
    params_opt =
        cmd->add_option("--params", params, "model parameters, k=v,k=v");
    cmd->add_option("--params-file", params_file,
                    "parameter file (e.g. a fit_best.txt)");
    if (with_split) {
      train_opt = cmd->add_option("--train-years", train_years,
                                  "training year range a-b");
      test_opt =
          cmd->add_option("--test-years", test_years, "test year range a-b");
      cmd->add_option("--surface", surface,
                      "restrict both splits to one surface");
    }
  }

  RunConfig file() const {
    return config_path.empty() ? RunConfig{}
                               : RunConfig::from_file(config_path);
  }

  // Fills unset flags from the config file.
  void resolve(const RunConfig& cfg) {
    if (model_opt->count() == 0 && cfg.has("model")) model = cfg.text("model", model);
    if (params_opt->count() == 0 && cfg.has("params"))
      params = cfg.text("params", params);
    if (matches_opt->count() == 0 && cfg.has("matches")) {
      matches.clear();
      std::istringstream in(cfg.text("matches", ""));
      for (std::string tok; in >> tok;) matches.push_back(tok);
    }
    if (train_opt && train_opt->count() == 0 && cfg.has("train_years"))
      train_years = cfg.text("train_years", train_years);
    if (test_opt && test_opt->count() == 0 && cfg.has("test_years"))
      test_years = cfg.text("test_years", test_years);
  }

  ratekit::ModelConfig make_model(const std::string& which_model,
                                  const std::string& kv,
                                  const std::string& kv_file) const {
    std::map<std::string, std::string> map;
    if (!kv_file.empty()) {
      const RunConfig stored = RunConfig::from_file(kv_file);
      static const std::set<std::string> bookkeeping = {
          "model", "train_avg_neg_loglike", "grid_evaluations",
          "rejected_grid_points"};
      for (const auto& [key, value] : stored.entries)
        if (!bookkeeping.contains(key)) map[key] = value;
    }
    for (const auto& [key, value] : ratekit::parse_kv_list(kv))
      map[key] = value;  // explicit flags win over the file
    return ratekit::make_config(ratekit::parse_model_kind(which_model), map);
  }

  static ratekit::YearRange parse_years(const std::string& text,
                                        const char* flag) {
    RunConfig probe;
    probe.set("y", text);
    const ratekit::YearRange range = probe.years("y", {0, 0});
    if (range.first == 0)
      throw std::runtime_error(std::string(flag) + ": expected a-b, got '" +
                               text + "'");
    return range;
  }

  ratekit::Dataset split() const {
    if (train_years.empty() || test_years.empty())
      throw std::runtime_error("--train-years and --test-years are required");
    ratekit::Dataset ds = ratekit::split_dataset(
        load_matches(matches), parse_years(train_years, "--train-years"),
        parse_years(test_years, "--test-years"));
    if (!surface.empty()) ds = ratekit::surface_restrict(ds, surface);
    return ds;
  }
};

void write_backtest_csv(const std::string& path,
                        const ratekit::BacktestReport& report) {
  auto out = open_out(path);
  out << "date,winner_id,loser_id,surface,p_hat_winner,correct\n";
  for (const ratekit::MatchScore& m : report.per_match)
    out << m.date.as_int() << ',' << m.winner_id << ',' << m.loser_id << ','
        << m.surface << ',' << g17(m.p_winner) << ',' << (m.correct ? 1 : 0)
        << '\n';
}

int run_ingest(const std::vector<std::string>& inputs,
               const std::string& output) {
  std::vector<fs::path> files(inputs.begin(), inputs.end());
  const ratekit::ParseResult parsed = ratekit::parse_matches(files);
  const auto kept = ratekit::filter_matches(parsed.records);
  std::printf("parsed %zu rows (%d dropped), kept %zu after filters\n",
              parsed.records.size() + parsed.dropped_rows, parsed.dropped_rows,
              kept.size());
  std::fputs(
      ratekit::summary_table(ratekit::summarize(kept, {})).c_str(), stdout);
  auto out = open_out(output);
  ratekit::write_canonical_csv(out, kept);
  std::printf("wrote %s\n", output.c_str());
  return 0;
}

int run_fit(Common& common, const std::vector<std::string>& sweeps,
            bool refine, int refine_seeds,
            const std::vector<std::string>& bounds, bool serial,
            const std::string& log_path, const std::string& best_path) {
  common.resolve(common.file());
  ratekit::ParamSpace space;
  space.model = ratekit::parse_model_kind(common.model);
  space.fixed = ratekit::parse_kv_list(common.params);
  for (const std::string& sweep : sweeps) {
    const auto eq = sweep.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--sweep: expected name=values, got '" + sweep +
                               "'");
    space.axes.push_back(ratekit::ParamAxis{
        sweep.substr(0, eq), ratekit::parse_value_list(sweep.substr(eq + 1))});
  }
  space.refine = refine;
  space.refine_seeds = refine_seeds;
  for (const std::string& bound : bounds) {
    const auto eq = bound.find('=');
    const auto values = eq == std::string::npos
                            ? std::vector<double>{}
                            : ratekit::parse_value_list(bound.substr(eq + 1));
    if (values.size() != 2)
      throw std::runtime_error("--bounds: expected name=lo,hi, got '" + bound +
                               "'");
    space.bounds[bound.substr(0, eq)] = {values[0], values[1]};
  }

  ratekit::Dataset ds = common.split();
  const ratekit::FitResult result =
      ratekit::fit(space, ds.train,
                   serial ? ratekit::Execution::serial
                          : ratekit::Execution::parallel);

  {
    auto log = open_out(log_path);
    for (const std::string& name : result.param_names) log << name << ',';
    log << "neg_loglike\n";
    for (const ratekit::FitEvaluation& eval : result.evaluation_log) {
      for (double v : eval.values) log << g17(v) << ',';
      log << g17(eval.neg_loglike) << '\n';
    }
  }
  {
    auto best = open_out(best_path);
    best << "model = " << common.model << '\n';
    for (const auto& [key, value] : space.fixed)
      best << key << " = " << value << '\n';
    for (const auto& [key, value] : result.best_params)
      best << key << " = " << g17(value) << '\n';
    best << "train_avg_neg_loglike = " << g17(result.train_avg_neg_loglike)
         << '\n';
    best << "grid_evaluations = " << result.grid_evaluations << '\n';
    best << "rejected_grid_points = " << result.rejected_grid_points << '\n';
  }

  std::printf("evaluated %zu grid points (%d rejected)\n",
              result.grid_evaluations, result.rejected_grid_points);
  for (const auto& [key, value] : result.best_params)
    std::printf("  %s = %s\n", key.c_str(), g6(value).c_str());
  std::printf("train avg neg loglike %s\nwrote %s and %s\n",
              g6(result.train_avg_neg_loglike).c_str(), log_path.c_str(),
              best_path.c_str());
  return 0;
}

int run_backtest(Common& common, const std::string& output) {
  common.resolve(common.file());
  const ratekit::Dataset ds = common.split();
  const auto config =
      common.make_model(common.model, common.params, common.params_file);
  const ratekit::BacktestReport report = ratekit::backtest(config, ds);
  std::fputs(ratekit::summary_table(ds.summary).c_str(), stdout);
  std::printf("%s: accuracy %s, avg neg loglike %s over %zu test matches\n",
              ratekit::describe(config).c_str(), g6(report.accuracy).c_str(),
              g6(report.avg_neg_loglike).c_str(), report.per_match.size());
  write_backtest_csv(output, report);
  std::printf("wrote %s\n", output.c_str());
  return 0;
}

int run_mcnemar(Common& common, const std::string& model2,
                const std::string& params2, const std::string& params_file2,
                const std::string& output) {
  common.resolve(common.file());
  const ratekit::Dataset ds = common.split();
  const auto config1 =
      common.make_model(common.model, common.params, common.params_file);
  const auto config2 = common.make_model(model2, params2, params_file2);
  const auto report1 = ratekit::backtest(config1, ds);
  const auto report2 = ratekit::backtest(config2, ds);
  const auto mc = ratekit::mcnemar_one_sided(report1.correct_flags(),
                                             report2.correct_flags());

  std::ostringstream text;
  text << "model1: " << ratekit::describe(config1) << "  accuracy "
       << g6(report1.accuracy) << '\n'
       << "model2: " << ratekit::describe(config2) << "  accuracy "
       << g6(report2.accuracy) << '\n'
       << "n12 (only model1 correct): " << mc.n12 << '\n'
       << "n21 (only model2 correct): " << mc.n21 << '\n';
  if (mc.z) {
    text << "z: " << g6(*mc.z) << '\n'
         << "one-sided p (model2 better): " << g6(*mc.p_value) << '\n';
  } else {
    text << "no discordant matches; test undefined\n";
  }
  std::fputs(text.str().c_str(), stdout);
  open_out(output) << text.str();
  std::printf("wrote %s\n", output.c_str());
  return 0;
}

int run_new_players(Common& common, const std::string& model2,
                    const std::string& params2,
                    const std::string& params_file2, int warmup, int window,
                    const std::string& output) {
  common.resolve(common.file());
  const auto constant_config =
      common.make_model(common.model, common.params, common.params_file);
  const auto variance_config = common.make_model(model2, params2, params_file2);
  const auto matches = load_matches(common.matches);
  const auto counts = ratekit::new_player_analysis(
      constant_config, variance_config, matches, warmup, window);
  std::printf(
      "cohort %d: constant better %d, variance better %d, tied %d\n",
      counts.total, counts.better_constant, counts.better_variance,
      counts.tied);
  auto out = open_out(output);
  out << "cohort,better_constant,better_variance,tied\n"
      << counts.total << ',' << counts.better_constant << ','
      << counts.better_variance << ',' << counts.tied << '\n';
  std::printf("wrote %s\n", output.c_str());
  return 0;
}

int run_residuals(Common& common, const std::string& player,
                  std::string output) {
  common.resolve(common.file());
  const auto config =
      common.make_model(common.model, common.params, common.params_file);
  const auto matches = load_matches(common.matches);
  const auto points = ratekit::player_residuals(config, matches, player);
  if (output.empty()) output = "residuals_" + player + ".csv";
  auto out = open_out(output);
  out << "index,date,opponent_id,surface,score,p_hat,residual\n";
  for (const ratekit::ResidualPoint& p : points)
    out << p.index << ',' << p.date.as_int() << ',' << p.opponent_id << ','
        << p.surface << ',' << p.score << ',' << g17(p.p_hat) << ','
        << g17(p.residual) << '\n';
  std::printf("%zu matches for %s, wrote %s\n", points.size(), player.c_str(),
              output.c_str());
  return 0;
}

int run_accuracy(const std::string& output, bool serial) {
  const auto cells = ratekit::single_match_accuracy_grid(!serial);
  const auto& refs = ratekit::single_match_accuracy_reference();
  open_out(output) << ratekit::single_match_accuracy_csv(cells);
  bool all_ok = true;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& cell = cells[i];
    const auto& ref = refs[i];
    const double pairs[4][2] = {{cell.re_mode_mean, ref.mode_mean},
                                {cell.re_mode_cov, ref.mode_cov},
                                {cell.re_step_mean, ref.step_mean},
                                {cell.re_step_cov, ref.step_cov}};
    bool ok = cell.quadrature.zeroth_moment_drift <= 1e-9;
    for (const auto& [got, want] : pairs)
      ok = ok && got / want >= 0.5 && got / want <= 2.0;
    std::printf("[%s] mu %s vs %s, sd %s/%s: mode %s|%s step %s|%s\n",
                ok ? "PASS" : "FAIL", g6(cell.mu1).c_str(),
                g6(cell.mu2).c_str(), g6(cell.sigma1).c_str(),
                g6(cell.sigma2).c_str(), g6(cell.re_mode_mean).c_str(),
                g6(cell.re_mode_cov).c_str(), g6(cell.re_step_mean).c_str(),
                g6(cell.re_step_cov).c_str());
    all_ok = all_ok && ok;
  }
  std::printf("wrote %s\n", output.c_str());
  if (!all_ok) throw std::runtime_error("grid outside the reference window");
  return 0;
}

int run_trajectory(double sigma_j, std::string output) {
  if (output.empty())
    output = "trajectory_" + std::to_string(static_cast<int>(sigma_j)) + ".csv";
  open_out(output) << ratekit::trajectory_csv(sigma_j);
  std::printf("wrote %s\n", output.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"paired-comparison rating engine"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "normalize raw annual CSVs");
  std::vector<std::string> ingest_inputs;
  std::string ingest_output = "matches.csv";
  ingest->add_option("files", ingest_inputs, "raw annual CSV files")
      ->required();
  ingest->add_option("--output", ingest_output, "normalized CSV to write");

  // fit
  auto* fit = app.add_subcommand("fit", "grid-search model parameters");
  Common fit_common;
  fit_common.attach(fit, true);
  std::vector<std::string> fit_sweeps, fit_bounds;
  bool fit_refine = false, fit_serial = false;
  int fit_refine_seeds = 10;
  std::string fit_log = "fit_log.csv", fit_best = "fit_best.txt";
  fit->add_option("--sweep", fit_sweeps,
                  "searched axis, name=lo:hi:step or name=v1,v2,...")
      ->required();
  fit->add_flag("--refine", fit_refine, "simplex refinement from best seeds");
  fit->add_option("--refine-seeds", fit_refine_seeds, "seeds to refine");
  fit->add_option("--bounds", fit_bounds, "refinement box, name=lo,hi");
  fit->add_flag("--serial", fit_serial, "single-threaded evaluation");
  fit->add_option("--log", fit_log, "evaluation log CSV");
  fit->add_option("--best", fit_best, "best-parameters file");

  // backtest
  auto* backtest = app.add_subcommand("backtest", "score the test split");
  Common bt_common;
  bt_common.attach(backtest, true);
  std::string bt_output = "backtest.csv";
  backtest->add_option("--output", bt_output, "per-match CSV to write");

  // mcnemar
  auto* mcnemar =
      app.add_subcommand("mcnemar", "paired accuracy comparison of two models");
  Common mc_common;
  mc_common.attach(mcnemar, true);
  std::string mc_model2 = "velo", mc_params2, mc_params_file2;
  std::string mc_output = "mcnemar.txt";
  mcnemar->add_option("--model2", mc_model2, "second model kind");
  mcnemar->add_option("--params2", mc_params2, "second model parameters");
  mcnemar->add_option("--params-file2", mc_params_file2,
                      "second model parameter file");
  mcnemar->add_option("--output", mc_output, "report to write");

  // new-players
  auto* newp = app.add_subcommand(
      "new-players", "early-match accuracy on newly appearing players");
  Common np_common;
  np_common.attach(newp, false);
  std::string np_model2 = "velo", np_params2, np_params_file2;
  std::string np_output = "new_players.csv";
  int np_warmup = 5000, np_window = 20;
  newp->add_option("--model2", np_model2, "variance-updating model kind");
  newp->add_option("--params2", np_params2, "its parameters");
  newp->add_option("--params-file2", np_params_file2, "its parameter file");
  newp->add_option("--warmup", np_warmup,
                   "matches before a first appearance counts as new");
  newp->add_option("--window", np_window, "early matches scored per player");
  newp->add_option("--output", np_output, "cohort counts CSV");

  // residuals
  auto* residuals =
      app.add_subcommand("residuals", "one player's forecast residuals");
  Common rs_common;
  rs_common.attach(residuals, false);
  std::string rs_player, rs_output;
  residuals->add_option("--player", rs_player, "player id")->required();
  residuals->add_option("--output", rs_output,
                        "CSV to write (default residuals_<player>.csv)");

  // accuracy
  auto* accuracy = app.add_subcommand(
      "accuracy", "one-match approximation errors vs numeric integration");
  std::string ac_output = "accuracy_grid.csv";
  bool ac_serial = false;
  accuracy->add_option("--output", ac_output, "grid CSV to write");
  accuracy->add_flag("--serial", ac_serial, "serial quadrature");

  // trajectory
  auto* trajectory = app.add_subcommand(
      "trajectory", "variance decay at pinned win probability");
  double tj_sigma_j = 200.0;
  std::string tj_output;
  trajectory->add_option("--sigma-j", tj_sigma_j,
                         "opponent stdev (reference panels: 100, 200)");
  trajectory->add_option("--output", tj_output, "CSV to write");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string stage = app.get_subcommands().front()->get_name();
  try {
    if (ingest->parsed()) return run_ingest(ingest_inputs, ingest_output);
    if (fit->parsed())
      return run_fit(fit_common, fit_sweeps, fit_refine, fit_refine_seeds,
                     fit_bounds, fit_serial, fit_log, fit_best);
    if (backtest->parsed()) return run_backtest(bt_common, bt_output);
    if (mcnemar->parsed())
      return run_mcnemar(mc_common, mc_model2, mc_params2, mc_params_file2,
                         mc_output);
    if (newp->parsed())
      return run_new_players(np_common, np_model2, np_params2, np_params_file2,
                             np_warmup, np_window, np_output);
    if (residuals->parsed()) return run_residuals(rs_common, rs_player, rs_output);
    if (accuracy->parsed()) return run_accuracy(ac_output, ac_serial);
    if (trajectory->parsed()) return run_trajectory(tj_sigma_j, tj_output);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s: %s\n", stage.c_str(), e.what());
    return 1;
  }
  return 2;
}
