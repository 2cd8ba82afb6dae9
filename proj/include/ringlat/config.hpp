#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ringlat {

// Raised on malformed files, unknown keys or type mismatches; the CLI maps
// it to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct KeySpec {
  const char* key;
  const char* type;  // "double" | "int" | "bool" | "string"
  const char* default_value;
  const char* help;
};

// Canonical parameter names; anything else is rejected.
const std::vector<KeySpec>& config_registry();

// Flat dotted-key -> raw value store. Files use a TOML subset: [table]
// headers, bare dotted keys, numbers / booleans / "strings", # comments.
class Config {
 public:
  Config() = default;
  static Config from_file(const std::filesystem::path& path);
  static Config from_string(const std::string& text, const std::string& origin = "<config>");

  // --set key=value; flags win over the file.
  void apply_override(const std::string& key_eq_value);

  void validate_keys() const;  // throws ConfigError on unknown keys

  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  bool is_set(const std::string& key) const { return kv_.count(key) != 0; }

  const std::map<std::string, std::string>& entries() const { return kv_; }

  // fully resolved view: every registry key with its effective value
  std::map<std::string, std::string> resolved() const;

 private:
  std::string raw_or_default(const std::string& key, const char* expect_type) const;
  std::map<std::string, std::string> kv_;
};

}  // namespace ringlat
