#pragma once
#include <map>
#include <string>
#include <vector>

#include "irml/errors.hpp"

namespace irml {

// Flat "key = value" text config; '#' starts a comment, blank lines ignored.
// Unknown keys are rejected by validate() so typos fail loudly.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_text(const std::string& text);

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  void set(const std::string& key, const std::string& value);  // CLI override

  std::string get_string(const std::string& key, const std::string& dflt) const;
  long get_int(const std::string& key, long dflt) const;
  double get_double(const std::string& key, double dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& dflt) const;

  // Throws ConfigError naming the offending key (and source line) when a key
  // is not in `known`.
  void validate(const std::vector<std::string>& known) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }
  // Canonical "key=value\n" text of the resolved entries, for hashing.
  std::string canonical() const;

 private:
  std::map<std::string, std::string> kv_;
  std::map<std::string, int> line_of_;
  [[noreturn]] void bad_value(const std::string& key) const;
};

uint64_t fnv1a64(const std::string& bytes);
std::string hex64(uint64_t v);

}  // namespace irml
