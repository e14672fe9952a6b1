#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace tf {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingKeyError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

struct KeySpec {
  std::string key;
  bool required = false;
  std::string fallback;  // used when not required and absent
  std::string help;
};

// Flat dotted-key tree: "section.key = value" lines, '#' comments, optional "[section]" headers.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<string>");
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  // Overrides each schema key from PREFIX + upper-cased key with '.' replaced by '_'.
  void apply_env(const std::vector<KeySpec>& schema, const std::string& prefix = "TETRAFRAME_");
  // Rejects unknown keys, reports missing required keys, then fills defaults.
  void validate(const std::vector<KeySpec>& schema);

  std::string str(const std::string& key) const;
  double num(const std::string& key) const;
  long integer(const std::string& key) const;
  unsigned long long u64(const std::string& key) const;
  bool flag(const std::string& key) const;

 private:
  std::map<std::string, std::string> entries_;
  std::string origin_;
};

std::string env_name(const std::string& key, const std::string& prefix = "TETRAFRAME_");

// Schemas of the config-driven subcommands: relax2d, relax3d, analyze, bentcore.
const std::vector<KeySpec>& schema_for(const std::string& command);

}  // namespace tf
