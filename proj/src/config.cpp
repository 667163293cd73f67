#include "echolab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace echolab::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

} // namespace

double parse_double(const std::string& text, const std::string& context) {
  const std::string t = trim(text);
  if (lower(t) == "inf" || lower(t) == "infinity")
    return std::numeric_limits<double>::infinity();
  try {
    std::size_t pos = 0;
    const double v = std::stod(t, &pos);
    if (pos != t.size())
      throw ConfigError(context + ": trailing characters in number '" + t + "'");
    return v;
  } catch (const std::invalid_argument&) {
    throw ConfigError(context + ": not a number: '" + t + "'");
  } catch (const std::out_of_range&) {
    throw ConfigError(context + ": number out of range: '" + t + "'");
  }
}

KeyValues KeyValues::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str(), path);
}

KeyValues KeyValues::from_string(const std::string& text,
                                 const std::string& origin) {
  KeyValues kv;
  kv.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected 'key = value', got '" + t + "'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    kv.entries_[key] = Entry{value, lineno, false};
  }
  return kv;
}

void KeyValues::set(const std::string& key, const std::string& value) {
  entries_[key] = Entry{value, 0, false};
}

bool KeyValues::has(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return false;
  it->second.used = true;
  return true;
}

std::optional<std::string> KeyValues::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  it->second.used = true;
  return it->second.value;
}

std::string KeyValues::get_string(const std::string& key,
                                  const std::string& fallback) const {
  const auto v = get(key);
  return v ? *v : fallback;
}

double KeyValues::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  return parse_double(*v, origin_ + ": key '" + key + "'");
}

double KeyValues::require_double(const std::string& key) const {
  const auto v = get(key);
  if (!v) throw ConfigError(origin_ + ": missing required key '" + key + "'");
  return parse_double(*v, origin_ + ": key '" + key + "'");
}

int KeyValues::get_int(const std::string& key, int fallback) const {
  const double v = get_double(key, double(fallback));
  const int i = int(v);
  if (double(i) != v)
    throw ConfigError(origin_ + ": key '" + key + "' must be an integer");
  return i;
}

bool KeyValues::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  const std::string t = lower(trim(*v));
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(origin_ + ": key '" + key + "' must be a boolean");
}

std::vector<std::string> KeyValues::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [key, entry] : entries_) {
    if (!entry.used)
      out.push_back(key + " (line " + std::to_string(entry.line) + ")");
  }
  return out;
}

void KeyValues::fail(const std::string& key, const std::string& message) const {
  throw ConfigError(origin_ + ": key '" + key + "': " + message);
}

} // namespace echolab::config
