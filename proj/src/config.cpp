#include "ratekit/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ratekit {

namespace {

std::string trim(std::string_view s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

double parse_number(const std::string& s, const std::string& what) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument(what + ": bad number: " + s);
  return out;
}

}  // namespace

RunConfig RunConfig::from_stream(std::istream& in, const std::string& name) {
  RunConfig config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(name + ":" + std::to_string(lineno) +
                               ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw std::runtime_error(name + ":" + std::to_string(lineno) +
                               ": empty key");
    config.entries[key] = trim(line.substr(eq + 1));
  }
  return config;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  return from_stream(in, path.filename().string());
}

void RunConfig::save(std::ostream& out) const {
  for (const auto& [key, value] : entries) out << key << " = " << value << '\n';
}

std::string RunConfig::text(const std::string& key,
                            const std::string& fallback) const {
  const auto it = entries.find(key);
  return it == entries.end() ? fallback : it->second;
}

int RunConfig::integer(const std::string& key, int fallback) const {
  const auto it = entries.find(key);
  if (it == entries.end()) return fallback;
  int out = 0;
  const std::string& s = it->second;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument(key + ": bad integer: " + s);
  return out;
}

YearRange RunConfig::years(const std::string& key, YearRange fallback) const {
  const auto it = entries.find(key);
  if (it == entries.end()) return fallback;
  const std::string& s = it->second;
  const auto dash = s.find('-');
  if (dash == std::string::npos)
    throw std::invalid_argument(key + ": expected first-last: " + s);
  YearRange out;
  out.first = static_cast<int>(parse_number(trim(s.substr(0, dash)), key));
  out.last = static_cast<int>(parse_number(trim(s.substr(dash + 1)), key));
  return out;
}

std::map<std::string, std::string> parse_kv_list(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (trim(item).empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("expected key=value, got: " + item);
    out[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
  }
  return out;
}

std::vector<double> parse_value_list(const std::string& text) {
  const std::string body = trim(text);
  if (body.empty()) throw std::invalid_argument("empty value list");
  std::vector<double> out;
  if (body.find(':') != std::string::npos) {
    std::istringstream in(body);
    std::string lo, hi, step;
    if (!std::getline(in, lo, ':') || !std::getline(in, hi, ':') ||
        !std::getline(in, step))
      throw std::invalid_argument("expected lo:hi:step, got: " + text);
    const double a = parse_number(trim(lo), "value list");
    const double b = parse_number(trim(hi), "value list");
    const double s = parse_number(trim(step), "value list");
    if (!(s > 0.0) || b < a)
      throw std::invalid_argument("bad sweep: " + text);
    // Half-step slack keeps the endpoint in despite accumulated rounding.
    for (double v = a; v <= b + 0.5 * s; v += s)
      out.push_back(std::min(v, b));
    return out;
  }
  std::istringstream in(body);
  std::string item;
  while (std::getline(in, item, ','))
    if (!trim(item).empty()) out.push_back(parse_number(trim(item), "value list"));
  if (out.empty()) throw std::invalid_argument("empty value list");
  return out;
}

}  // namespace ratekit
