#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace geomag::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string where(const std::string& key, int line) {
  if (line > 0) return "line " + std::to_string(line) + ": key '" + key + "': ";
  return "key '" + key + "': ";
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace

ConfigError::ConfigError(std::string key, int line, const std::string& message)
    : std::runtime_error(where(key, line) + message), key_(std::move(key)), line_(line) {}

Config::Config(std::vector<KeySpec> schema) : schema_(std::move(schema)) {}

const KeySpec* Config::find(const std::string& key) const {
  const auto it = std::find_if(schema_.begin(), schema_.end(),
                               [&](const KeySpec& k) { return k.name == key; });
  return it == schema_.end() ? nullptr : &*it;
}

const Config::Entry* Config::entry(const std::string& key) const {
  const auto it = given_.find(key);
  return it == given_.end() ? nullptr : &it->second;
}

void Config::load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", 0, "cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  load_text(buf.str(), path.string());
}

void Config::load_text(std::string_view text, const std::string& origin) {
  std::map<std::string, int> seen;
  std::stringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(body, line, "expected 'key = value' in " + origin);
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError("", line, "missing key");
    if (!find(key)) throw ConfigError(key, line, "unknown key");
    if (seen.count(key)) {
      throw ConfigError(key, line, "duplicate key (first set on line " + std::to_string(seen[key]) + ")");
    }
    seen[key] = line;
    given_[key] = {value, line};
  }
}

void Config::set_override(const std::string& key, const std::string& value) {
  if (!find(key)) throw ConfigError(key, 0, "unknown key");
  given_[key] = {value, 0};
}

bool Config::given(const std::string& key) const { return entry(key) != nullptr; }

bool Config::has(const std::string& key) const { return !text(key).empty(); }

std::string Config::text(const std::string& key) const {
  const KeySpec* spec = find(key);
  if (!spec) throw ConfigError(key, 0, "not a key of this command");
  if (const Entry* e = entry(key)) return e->value;
  return spec->default_value;
}

std::vector<std::string> Config::list(const std::string& key) const {
  std::vector<std::string> out;
  for (auto& item : split_list(text(key))) {
    if (!item.empty()) out.push_back(std::move(item));
  }
  return out;
}

void Config::fail(const std::string& key, const std::string& message) const {
  const Entry* e = entry(key);
  throw ConfigError(key, e ? e->line : 0, message);
}

double Config::number(const std::string& key) const {
  const std::string s = text(key);
  if (s.empty()) fail(key, "a value is required");
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
    fail(key, "'" + s + "' is not a finite number");
  }
  return v;
}

std::vector<double> Config::numbers(const std::string& key) const {
  const std::string s = text(key);
  std::vector<double> out;
  if (s.empty()) return out;
  for (const auto& item : split_list(s)) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || p != item.data() + item.size() || !std::isfinite(v)) {
      fail(key, "'" + item + "' is not a finite number");
    }
    out.push_back(v);
  }
  return out;
}

long long Config::integer(const std::string& key) const {
  const std::string s = text(key);
  if (s.empty()) fail(key, "a value is required");
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) fail(key, "'" + s + "' is not an integer");
  return v;
}

std::vector<int> Config::integers(const std::string& key) const {
  std::vector<int> out;
  const std::string s = text(key);
  if (s.empty()) return out;
  for (const auto& item : split_list(s)) {
    int v = 0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || p != item.data() + item.size()) {
      fail(key, "'" + item + "' is not an integer");
    }
    out.push_back(v);
  }
  return out;
}

std::uint64_t Config::unsigned_integer(const std::string& key) const {
  const std::string s = text(key);
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size()) {
    fail(key, "'" + s + "' is not a nonnegative integer");
  }
  return v;
}

bool Config::flag(const std::string& key) const {
  const std::string s = text(key);
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0" || s.empty()) return false;
  fail(key, "'" + s + "' is not a boolean");
}

std::vector<std::pair<std::string, std::string>> Config::resolved() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : schema_) out.emplace_back(k.name, text(k.name));
  return out;
}

}  // namespace geomag::cli
