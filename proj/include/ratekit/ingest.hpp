#pragma once

#include <array>
#include <compare>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ratekit {

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;
  auto operator<=>(const Date&) const = default;
  int as_int() const { return year * 10000 + month * 100 + day; }
};

struct MatchRecord {
  Date date;
  std::string tourney_id;
  int match_num = 0;
  std::string winner_id;
  std::string loser_id;
  std::string surface;  // lowercase: clay, grass, hard (carpet until filtered)
  std::string score;
  bool operator==(const MatchRecord&) const = default;
};

// Chronological total order: date, then tournament, then match number.
bool match_order(const MatchRecord& a, const MatchRecord& b);

struct ParseResult {
  std::vector<MatchRecord> records;
  int dropped_rows = 0;  // rows missing required fields or unparseable
};

// Reads raw annual CSV files. Requires the header to name tourney_date,
// tourney_id, match_num, winner_id, loser_id, surface and score; a missing
// column is an error naming the file and column. Rows with missing or
// unparseable required fields are dropped and counted.
ParseResult parse_matches(const std::vector<std::filesystem::path>& files);
ParseResult parse_matches_csv(std::istream& in, const std::string& name);

// Drops matches decided off the court (retirements, walkovers, defaults,
// weather) and carpet-surface matches. Everything else passes unchanged.
std::vector<MatchRecord> filter_matches(std::vector<MatchRecord> records);

struct YearRange {
  int first = 0;
  int last = 0;  // inclusive
};

struct SurfaceCounts {
  long total = 0;
  long hard = 0;
  long clay = 0;
  long grass = 0;
};

struct DatasetSummary {
  SurfaceCounts train;
  SurfaceCounts test;
  SurfaceCounts all;
};

struct Dataset {
  std::vector<MatchRecord> train;
  std::vector<MatchRecord> test;
  DatasetSummary summary;
};

// Orders records chronologically and splits them by year. Ranges must be
// non-empty, non-overlapping, with training strictly before testing;
// records outside both ranges are dropped.
Dataset split_dataset(std::vector<MatchRecord> records, YearRange train_years,
                      YearRange test_years);

DatasetSummary summarize(std::span<const MatchRecord> train,
                         std::span<const MatchRecord> test);
std::string summary_table(const DatasetSummary& summary);

// Normalized form: date,tourney_id,match_num,winner_id,loser_id,surface.
// Writing then reading reproduces the records (scores are not carried).
void write_canonical_csv(std::ostream& out, std::span<const MatchRecord> records);
std::vector<MatchRecord> read_canonical_csv(std::istream& in);

}  // namespace ratekit
