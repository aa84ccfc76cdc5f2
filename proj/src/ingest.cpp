#include "ratekit/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ratekit {

namespace {

std::string to_upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// Splits one CSV line; supports double-quoted fields with embedded commas.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

bool parse_int(std::string_view s, int& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_date(std::string_view s, Date& out) {
  int v = 0;
  if (!parse_int(s, v)) return false;
  out = {v / 10000, v / 100 % 100, v % 100};
  return out.year >= 1800 && out.month >= 1 && out.month <= 12 &&
         out.day >= 1 && out.day <= 31;
}

bool known_surface(const std::string& lower) {
  return lower == "hard" || lower == "clay" || lower == "grass" ||
         lower == "carpet";
}

}  // namespace

bool match_order(const MatchRecord& a, const MatchRecord& b) {
  if (a.date != b.date) return a.date < b.date;
  if (a.tourney_id != b.tourney_id) return a.tourney_id < b.tourney_id;
  return a.match_num < b.match_num;
}

ParseResult parse_matches_csv(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("parse_matches: " + name + ": empty file");
  const std::vector<std::string> header = split_csv(line);
  std::map<std::string, size_t> index;
  for (size_t i = 0; i < header.size(); ++i) index[trim(header[i])] = i;
  const char* required[] = {"tourney_date", "tourney_id", "match_num",
                            "winner_id",    "loser_id",   "surface",
                            "score"};
  for (const char* col : required) {
    if (!index.contains(col))
      throw std::runtime_error("parse_matches: " + name +
                               ": missing required column " + col);
  }
  auto field = [&](const std::vector<std::string>& row, const char* col) {
    const size_t i = index.at(col);
    return i < row.size() ? trim(row[i]) : std::string();
  };
  ParseResult result;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::vector<std::string> row = split_csv(line);
    MatchRecord rec;
    rec.tourney_id = field(row, "tourney_id");
    rec.winner_id = field(row, "winner_id");
    rec.loser_id = field(row, "loser_id");
    rec.surface = to_lower(field(row, "surface"));
    rec.score = field(row, "score");
    const bool ok = !rec.tourney_id.empty() && !rec.winner_id.empty() &&
                    !rec.loser_id.empty() && known_surface(rec.surface) &&
                    parse_date(field(row, "tourney_date"), rec.date) &&
                    parse_int(field(row, "match_num"), rec.match_num);
    if (ok)
      result.records.push_back(std::move(rec));
    else
      ++result.dropped_rows;
  }
  return result;
}

ParseResult parse_matches(const std::vector<std::filesystem::path>& files) {
  ParseResult all;
  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in)
      throw std::runtime_error("parse_matches: cannot open " + path.string());
    ParseResult one = parse_matches_csv(in, path.filename().string());
    all.dropped_rows += one.dropped_rows;
    all.records.insert(all.records.end(),
                       std::make_move_iterator(one.records.begin()),
                       std::make_move_iterator(one.records.end()));
  }
  return all;
}

std::vector<MatchRecord> filter_matches(std::vector<MatchRecord> records) {
  static const char* tokens[] = {"RET", "W/O", "DEF", "WEA", "WALKOVER"};
  std::erase_if(records, [](const MatchRecord& rec) {
    if (rec.surface == "carpet") return true;
    const std::string score = to_upper(rec.score);
    for (const char* token : tokens)
      if (score.find(token) != std::string::npos) return true;
    return false;
  });
  return records;
}

DatasetSummary summarize(std::span<const MatchRecord> train,
                         std::span<const MatchRecord> test) {
  DatasetSummary s;
  auto count = [](std::span<const MatchRecord> records, SurfaceCounts& c) {
    for (const MatchRecord& rec : records) {
      ++c.total;
      if (rec.surface == "hard") ++c.hard;
      else if (rec.surface == "clay") ++c.clay;
      else if (rec.surface == "grass") ++c.grass;
    }
  };
  count(train, s.train);
  count(test, s.test);
  s.all = {s.train.total + s.test.total, s.train.hard + s.test.hard,
           s.train.clay + s.test.clay, s.train.grass + s.test.grass};
  return s;
}

Dataset split_dataset(std::vector<MatchRecord> records, YearRange train_years,
                      YearRange test_years) {
  if (train_years.first > train_years.last ||
      test_years.first > test_years.last)
    throw std::invalid_argument("split_dataset: empty year range");
  if (train_years.last >= test_years.first)
    throw std::invalid_argument(
        "split_dataset: training years must precede testing years");
  std::stable_sort(records.begin(), records.end(), match_order);
  Dataset out;
  for (MatchRecord& rec : records) {
    if (rec.date.year >= train_years.first && rec.date.year <= train_years.last)
      out.train.push_back(std::move(rec));
    else if (rec.date.year >= test_years.first && rec.date.year <= test_years.last)
      out.test.push_back(std::move(rec));
  }
  out.summary = summarize(out.train, out.test);
  return out;
}

std::string summary_table(const DatasetSummary& s) {
  std::ostringstream out;
  auto row = [&](const char* label, long a, long b, long c) {
    out << label << '\t' << a << '\t' << b << '\t' << c << '\n';
  };
  out << "matches\ttrain\ttest\ttotal\n";
  row("all", s.train.total, s.test.total, s.all.total);
  row("hard", s.train.hard, s.test.hard, s.all.hard);
  row("clay", s.train.clay, s.test.clay, s.all.clay);
  row("grass", s.train.grass, s.test.grass, s.all.grass);
  return out.str();
}

void write_canonical_csv(std::ostream& out,
                         std::span<const MatchRecord> records) {
  out << "date,tourney_id,match_num,winner_id,loser_id,surface\n";
  for (const MatchRecord& rec : records) {
    out << rec.date.as_int() << ',' << rec.tourney_id << ',' << rec.match_num
        << ',' << rec.winner_id << ',' << rec.loser_id << ',' << rec.surface
        << '\n';
  }
}

std::vector<MatchRecord> read_canonical_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("read_canonical_csv: empty input");
  std::vector<MatchRecord> records;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::vector<std::string> row = split_csv(line);
    if (row.size() != 6)
      throw std::runtime_error("read_canonical_csv: malformed row: " + line);
    MatchRecord rec;
    if (!parse_date(row[0], rec.date) || !parse_int(row[2], rec.match_num))
      throw std::runtime_error("read_canonical_csv: malformed row: " + line);
    rec.tourney_id = row[1];
    rec.winner_id = row[3];
    rec.loser_id = row[4];
    rec.surface = row[5];
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace ratekit
