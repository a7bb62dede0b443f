// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sardet {

/// Plain-text `key = value` configuration with optional `[section]`
/// headers and `#` comments. Keys inside a section are addressed as
/// "section.key". Serialization is canonical: sections and keys in
/// first-seen order, one `key = value` per line.
class KeyValueConfig {
public:
  KeyValueConfig() = default;

  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_string(const std::string& text);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Required variants: throw param_error when the key is missing.
  std::int64_t require_int(const std::string& key) const;
  double require_double(const std::string& key) const;
  const std::string& require(const std::string& key) const;

  void set(const std::string& key, const std::string& value);

  std::string serialize() const;

  const std::vector<std::string>& ordered_keys() const { return order_; }

  bool operator==(const KeyValueConfig& other) const { return values_ == other.values_; }

private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
};

/// Comma/semicolon helpers shared by scene specs and CLI sweeps.
std::vector<std::string> split(const std::string& s, char sep);
std::string trim(const std::string& s);

}  // namespace sardet
