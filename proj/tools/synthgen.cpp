// Writes a deterministic synthetic tour corpus in the raw annual CSV schema,
// for exercising the pipeline end to end without real data.

#include <CLI11.hpp>
#include <cstdio>

#include "ratekit/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"synthetic match corpus generator"};
  std::string output_dir = ".";
  ratekit::SyntheticOptions options;
  app.add_option("--output-dir", output_dir, "directory for the annual files");
  app.add_option("--seed", options.seed, "generator seed");
  app.add_option("--first-year", options.first_year, "first season");
  app.add_option("--last-year", options.last_year, "last season");
  app.add_option("--players", options.players, "pool size");
  app.add_option("--events-per-year", options.events_per_year,
                 "events per season");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto files = ratekit::write_synthetic_corpus(output_dir, options);
    for (const auto& file : files)
      std::printf("wrote %s\n", file.string().c_str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "synthgen: %s\n", e.what());
    return 1;
  }
  return 0;
}
