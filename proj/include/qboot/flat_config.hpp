#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qboot {

// Flat "key = value" configuration text: one pair per line, '#' starts a
// comment, blank lines ignored. Keys are unique; later duplicates override.
class FlatConfig {
 public:
  static FlatConfig parse(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& dflt) const;
  double get_double(const std::string& key, double dflt) const;
  long long get_int(const std::string& key, long long dflt) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;

  // Keys present in the text but not in `allowed`, in file order.
  std::vector<std::string> unknown_keys(
      const std::vector<std::string>& allowed) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
  std::vector<std::string> order_;
};

// Split a comma/semicolon separated list, trimming whitespace.
std::vector<std::string> split_list(const std::string& text, char sep);

std::uint64_t fnv1a64(std::string_view text);
std::string fnv1a64_hex(std::string_view text);

}  // namespace qboot
