#include "qboot/flat_config.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "qboot/errors.hpp"

namespace qboot {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

FlatConfig FlatConfig::parse(const std::string& text) {
  FlatConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");
    if (cfg.entries_.find(key) == cfg.entries_.end()) cfg.order_.push_back(key);
    cfg.entries_[key] = value;
  }
  return cfg;
}

bool FlatConfig::has(const std::string& key) const {
  return entries_.count(key) > 0;
}

std::string FlatConfig::get_string(const std::string& key,
                                   const std::string& dflt) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? dflt : it->second;
}

double FlatConfig::get_double(const std::string& key, double dflt) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return dflt;
  try {
    std::size_t pos = 0;
    double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: " + it->second);
  }
}

long long FlatConfig::get_int(const std::string& key, long long dflt) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return dflt;
  try {
    std::size_t pos = 0;
    long long v = std::stoll(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: " + it->second);
  }
}

std::uint64_t FlatConfig::get_uint64(const std::string& key,
                                     std::uint64_t dflt) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return dflt;
  try {
    std::size_t pos = 0;
    unsigned long long v = std::stoull(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: " + it->second);
  }
}

bool FlatConfig::get_bool(const std::string& key, bool dflt) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return dflt;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': not a boolean: " + v);
}

std::vector<std::string> FlatConfig::unknown_keys(
    const std::vector<std::string>& allowed) const {
  std::vector<std::string> bad;
  for (const auto& key : order_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      bad.push_back(key);
  }
  return bad;
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view text) {
  std::uint64_t h = fnv1a64(text);
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

}  // namespace qboot
