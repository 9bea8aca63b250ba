#include "irml/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace irml {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_text(ss.str());
}

KeyValueConfig KeyValueConfig::parse_text(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");
    if (cfg.kv_.count(key))
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
    cfg.kv_[key] = val;
    cfg.line_of_[key] = lineno;
  }
  return cfg;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  kv_[key] = value;
  line_of_[key] = 0;  // 0 = CLI override, no source line
}

void KeyValueConfig::bad_value(const std::string& key) const {
  throw ConfigError("config key '" + key + "': cannot parse value '" +
                    kv_.at(key) + "'");
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& dflt) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? dflt : it->second;
}

long KeyValueConfig::get_int(const std::string& key, long dflt) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  try {
    size_t pos = 0;
    long v = std::stol(it->second, &pos);
    if (pos != it->second.size()) bad_value(key);
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    bad_value(key);
  }
}

double KeyValueConfig::get_double(const std::string& key, double dflt) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  try {
    size_t pos = 0;
    double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) bad_value(key);
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    bad_value(key);
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool dflt) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key);
}

std::vector<double> KeyValueConfig::get_double_list(
    const std::string& key, const std::vector<double>& dflt) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  std::vector<double> out;
  std::string tok;
  std::istringstream ss(it->second);
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) bad_value(key);
    try {
      size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) bad_value(key);
    } catch (const ConfigError&) {
      throw;
    } catch (...) {
      bad_value(key);
    }
  }
  if (out.empty()) bad_value(key);
  return out;
}

void KeyValueConfig::validate(const std::vector<std::string>& known) const {
  for (const auto& [key, val] : kv_) {
    if (std::find(known.begin(), known.end(), key) != known.end()) continue;
    auto lit = line_of_.find(key);
    std::string where = lit != line_of_.end() && lit->second > 0
                            ? " (line " + std::to_string(lit->second) + ")"
                            : "";
    throw ConfigError("unknown config key '" + key + "'" + where);
  }
}

std::string KeyValueConfig::canonical() const {
  std::string out;
  for (const auto& [key, val] : kv_) {
    out += key;
    out += '=';
    out += val;
    out += '\n';
  }
  return out;
}

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace irml
