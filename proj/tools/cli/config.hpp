#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace geomag::cli {

/// Bad configuration. `line` is 0 for command-line overrides.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, int line, const std::string& message);
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

struct KeySpec {
  std::string name;
  std::string default_value;  // empty: unset unless given
  std::string help;
};

/// Flat `key = value` configuration with `#` comments. Values from the file
/// are replaced by command-line overrides. Keys outside the schema are errors.
class Config {
 public:
  explicit Config(std::vector<KeySpec> schema);

  void load_file(const std::filesystem::path& path);
  void load_text(std::string_view text, const std::string& origin = "config");
  void set_override(const std::string& key, const std::string& value);

  /// True when the key resolves to a nonempty value.
  bool has(const std::string& key) const;
  /// True when the key was given in the file or as an override.
  bool given(const std::string& key) const;

  std::string text(const std::string& key) const;
  /// Comma-separated items, trimmed; empty items dropped.
  std::vector<std::string> list(const std::string& key) const;
  double number(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  long long integer(const std::string& key) const;
  std::vector<int> integers(const std::string& key) const;
  std::uint64_t unsigned_integer(const std::string& key) const;
  bool flag(const std::string& key) const;

  /// Every schema key with its resolved value, in schema order.
  std::vector<std::pair<std::string, std::string>> resolved() const;
  const std::vector<KeySpec>& schema() const noexcept { return schema_; }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  const KeySpec* find(const std::string& key) const;
  const Entry* entry(const std::string& key) const;

  std::vector<KeySpec> schema_;
  std::map<std::string, Entry> given_;
};

}  // namespace geomag::cli
