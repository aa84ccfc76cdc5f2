#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ratekit/ingest.hpp"

namespace ratekit {

// Flat key = value settings store ('#' starts a comment). Keys are free
// form; the command line overrides individual keys. Saving and reloading
// reproduces the store exactly.
struct RunConfig {
  std::map<std::string, std::string> entries;

  static RunConfig from_file(const std::filesystem::path& path);
  static RunConfig from_stream(std::istream& in, const std::string& name);
  void save(std::ostream& out) const;

  bool has(const std::string& key) const { return entries.contains(key); }
  void set(const std::string& key, const std::string& value) {
    entries[key] = value;
  }
  std::string text(const std::string& key, const std::string& fallback) const;
  int integer(const std::string& key, int fallback) const;
  YearRange years(const std::string& key, YearRange fallback) const;  // "a-b"
};

// "a=1,b=2" into ordered key/value pairs; empty input gives an empty map.
std::map<std::string, std::string> parse_kv_list(const std::string& text);

// "lo:hi:step" (inclusive sweep) or "v1,v2,v3" or a single value.
std::vector<double> parse_value_list(const std::string& text);

}  // namespace ratekit
