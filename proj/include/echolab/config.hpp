#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace echolab::config {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Flat dotted-key configuration (key = value per line, '#' comments).
/// Lookups mark keys as used so unknown keys can be reported with their
/// line numbers.
class KeyValues {
public:
  static KeyValues from_file(const std::string& path);
  static KeyValues from_string(const std::string& text,
                               const std::string& origin = "<config>");

  /// CLI override; wins over file values. Line number 0 marks overrides.
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  /// Accepts "inf" (case-insensitive) as infinity.
  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Keys present but never looked up, formatted "key (line N)".
  std::vector<std::string> unused_keys() const;
  const std::string& origin() const { return origin_; }

  [[noreturn]] void fail(const std::string& key,
                         const std::string& message) const;

private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
  };
  std::map<std::string, Entry> entries_;
  std::string origin_ = "<config>";
};

/// Parses a double, accepting "inf"; throws ConfigError on garbage.
double parse_double(const std::string& text, const std::string& context);

} // namespace echolab::config
