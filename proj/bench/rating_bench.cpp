// Times the two data-parallel kernels (parameter-grid evaluation and the
// panel-refined quadrature grid) serial vs OpenMP, and checks that both
// executions agree. Match replay itself is sequential by construction, so
// the speedup lives in evaluating independent grid points and panels.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <omp.h>

#include "ratekit/fitting.hpp"
#include "ratekit/ingest.hpp"
#include "ratekit/report.hpp"
#include "ratekit/synthetic.hpp"

using h_clock = std::chrono::high_resolution_clock;

namespace {

double ms_since(h_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(h_clock::now() - t0)
      .count();
}

std::vector<ratekit::MatchRecord> bench_matches() {
  const auto dir = std::filesystem::temp_directory_path() / "ratekit-bench";
  std::filesystem::create_directories(dir);
  ratekit::SyntheticOptions options;
  options.seed = 99;
  options.first_year = 2012;
  options.last_year = 2016;
  options.players = 120;
  options.events_per_year = 30;
  const auto files = ratekit::write_synthetic_corpus(dir, options);
  auto parsed = ratekit::parse_matches(files);
  return ratekit::filter_matches(std::move(parsed.records));
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  const auto matches = bench_matches();
  std::printf("replaying %zu matches per grid point\n\n", matches.size());

  // Kernel 1: the fit grid. 24 independent parameter points.
  ratekit::ParamSpace space;
  space.model = ratekit::ModelKind::velo;
  space.axes.push_back({"sigma0", {80, 100, 120, 140, 160, 180, 200, 220}});
  space.axes.push_back({"A", {0.0, 0.5, 1.0}});
  space.fixed = {{"B", "45"}};

  const int reps = 3;
  double serial_ms = 0.0, parallel_ms = 0.0;
  ratekit::FitResult serial_fit, parallel_fit;
  for (int r = 0; r < reps; ++r) {
    auto t0 = h_clock::now();
    serial_fit = ratekit::fit(space, matches, ratekit::Execution::serial);
    serial_ms += ms_since(t0);
    t0 = h_clock::now();
    parallel_fit = ratekit::fit(space, matches, ratekit::Execution::parallel);
    parallel_ms += ms_since(t0);
  }
  serial_ms /= reps;
  parallel_ms /= reps;

  bool same = serial_fit.evaluation_log.size() ==
              parallel_fit.evaluation_log.size();
  for (std::size_t i = 0; same && i < serial_fit.evaluation_log.size(); ++i)
    same = serial_fit.evaluation_log[i].neg_loglike ==
           parallel_fit.evaluation_log[i].neg_loglike;
  std::printf("fit grid (%zu points): serial %.1f ms, parallel %.1f ms, "
              "speedup %.2fx, logs %s\n",
              serial_fit.grid_evaluations, serial_ms, parallel_ms,
              serial_ms / parallel_ms, same ? "identical" : "DIFFER");

  // Kernel 2: the quadrature accuracy grid. Independent cells and panels.
  double q_serial_ms = 0.0, q_parallel_ms = 0.0;
  std::vector<ratekit::SingleMatchAccuracyCell> q_serial, q_parallel;
  for (int r = 0; r < reps; ++r) {
    auto t0 = h_clock::now();
    q_serial = ratekit::single_match_accuracy_grid(false);
    q_serial_ms += ms_since(t0);
    t0 = h_clock::now();
    q_parallel = ratekit::single_match_accuracy_grid(true);
    q_parallel_ms += ms_since(t0);
  }
  q_serial_ms /= reps;
  q_parallel_ms /= reps;

  bool q_same = q_serial.size() == q_parallel.size();
  for (std::size_t i = 0; q_same && i < q_serial.size(); ++i)
    q_same = q_serial[i].re_mode_mean == q_parallel[i].re_mode_mean &&
             q_serial[i].re_mode_cov == q_parallel[i].re_mode_cov &&
             q_serial[i].re_step_mean == q_parallel[i].re_step_mean &&
             q_serial[i].re_step_cov == q_parallel[i].re_step_cov;
  std::printf("quadrature grid (%zu cells): serial %.1f ms, parallel %.1f ms, "
              "speedup %.2fx, cells %s\n",
              q_serial.size(), q_serial_ms, q_parallel_ms,
              q_serial_ms / q_parallel_ms, q_same ? "identical" : "DIFFER");

  return (same && q_same) ? 0 : 1;
}
