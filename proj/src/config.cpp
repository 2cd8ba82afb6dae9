#include "ringlat/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ringlat {

const std::vector<KeySpec>& config_registry() {
  static const std::vector<KeySpec> keys = {
      {"physical.gamma_c", "double", "53763.440860215054", "field decay rate, 1/s"},
      {"physical.delta0", "double", "0.091", "light shift per photon, 1/s"},
      {"physical.w0", "double", "131.5e-6", "mode radius, m"},
      {"physical.lambda", "double", "780.241e-9", "optical wavelength, m"},
      {"physical.mass", "double", "1.4099934e-25", "atomic mass, kg"},
      {"pump.chi0_minus", "double", "0.48", "unlocked-mode pump fraction"},
      {"model.un0", "double", "2.38", "initial interaction strength U*N"},
      {"model.eta_ax", "double", "0.5", "thermal/axial-depth ratio at t=0"},
      {"model.eta_rad", "double", "0.3", "thermal/radial-depth ratio at t=0"},
      {"model.a0_mod", "double", "0.31622776601683794", "reference |a(0)|"},
      {"decay.gamma_bg", "double", "0.58823529411764708", "background loss rate, 1/s"},
      {"decay.q", "double", "0.3", "two-body coefficient per UN unit, 1/s"},
      {"decay.n_scale", "double", "1.0", "multiplier applied to measured UN"},
      {"run.t_end_s", "double", "0", "run length, s (0 = scenario default)"},
      {"run.out_stride_tau", "double", "0", "output stride, scaled time (0 = default)"},
      {"run.seed", "int", "12345", "RNG seed"},
      {"integ.rtol", "double", "1e-8", "integrator relative tolerance"},
      {"integ.atol", "double", "1e-10", "integrator absolute tolerance"},
      {"integ.a_min", "double", "1e-9", "singular floor for |a|"},
      {"diagram.un_max", "double", "6.0", "continuation ceiling in UN"},
      {"diagram.n_samples", "int", "241", "continuation UN samples"},
      {"diagram.grid_n", "int", "4096", "phi scan grid"},
      {"full.n_sim", "int", "100", "simulated atom count"},
      {"full.n_real", "double", "0", "physical atom count (0 = from un0/delta0)"},
      {"full.nu_ax_sym_hz", "double", "550e3", "axial frequency, symmetric pumping, no atoms"},
      {"full.steps_per_period", "int", "50", "RK4 steps per axial period"},
      {"fig8.step_factor", "double", "0.5", "I0 multiplier during the step"},
      {"fig8.t_on_s", "double", "0.0", "step start, s"},
      {"fig8.t_off_s", "double", "0.002", "step end, s"},
      {"mot.loading_rate", "double", "2.66", "MOT loading rate, UN/s at reference depth"},
      {"mot.un0", "double", "1.5", "initial UN for the loading scenario"},
      {"mot.q", "double", "0.0", "two-body coefficient while loading"},
      {"noise.series_path", "string", "", "intensity time-series CSV (optional)"},
      {"noise.nu_ax_hz", "double", "350e3", "axial trap frequency, Hz"},
      {"noise.nu_rad_hz", "double", "450", "radial trap frequency, Hz"},
      {"noise.s_at_2nu_ax", "double", "1.5e-13", "S(2 nu_ax), 1/Hz (spot-value mode)"},
      {"noise.s_at_2nu_rad", "double", "3e-9", "S(2 nu_rad), 1/Hz (spot-value mode)"},
      {"noise.segment_length", "int", "4096", "Welch segment length"},
      {"noise.overlap", "double", "0.5", "Welch overlap fraction"},
  };
  return keys;
}

namespace {

const KeySpec* find_spec(const std::string& key) {
  for (const auto& s : config_registry())
    if (key == s.key) return &s;
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

std::string parse_value(const std::string& raw, const std::string& where) {
  if (raw.empty()) throw ConfigError(where + ": missing value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"')
      throw ConfigError(where + ": unterminated string");
    return raw.substr(1, raw.size() - 2);
  }
  if (raw.front() == '[' || raw.front() == '{')
    throw ConfigError(where + ": arrays and inline tables are not supported");
  return raw;
}

}  // namespace

Config Config::from_string(const std::string& text, const std::string& origin) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::string prefix;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = origin + ":" + std::to_string(line_no);
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed table header");
      prefix = trim(line.substr(1, line.size() - 2));
      if (prefix.empty()) throw ConfigError(where + ": empty table name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (!prefix.empty()) key = prefix + "." + key;
    const std::string value = parse_value(trim(line.substr(eq + 1)), where);
    if (cfg.kv_.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    cfg.kv_[key] = value;
  }
  return cfg;
}

Config Config::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str(), path.string());
}

void Config::apply_override(const std::string& key_eq_value) {
  const auto eq = key_eq_value.find('=');
  if (eq == std::string::npos)
    throw ConfigError("--set expects key=value, got '" + key_eq_value + "'");
  const std::string key = trim(key_eq_value.substr(0, eq));
  const std::string value = parse_value(trim(key_eq_value.substr(eq + 1)), "--set " + key);
  if (key.empty()) throw ConfigError("--set: empty key");
  kv_[key] = value;
}

void Config::validate_keys() const {
  std::string bad;
  for (const auto& [key, value] : kv_) {
    if (!find_spec(key)) bad += (bad.empty() ? "" : ", ") + key;
  }
  if (!bad.empty()) throw ConfigError("unknown config key(s): " + bad);
}

std::string Config::raw_or_default(const std::string& key,
                                   const char* expect_type) const {
  const KeySpec* spec = find_spec(key);
  if (!spec) throw ConfigError("key not in registry: " + key);
  if (std::string(spec->type) != expect_type)
    throw ConfigError("key " + key + " has type " + spec->type + ", requested " +
                      expect_type);
  const auto it = kv_.find(key);
  return it != kv_.end() ? it->second : std::string(spec->default_value);
}

double Config::get_double(const std::string& key) const {
  const std::string raw = raw_or_default(key, "double");
  char* end = nullptr;
  const double v = std::strtod(raw.c_str(), &end);
  if (end == raw.c_str() || *end != '\0')
    throw ConfigError("key " + key + ": cannot parse '" + raw + "' as a number");
  return v;
}

std::int64_t Config::get_int(const std::string& key) const {
  const std::string raw = raw_or_default(key, "int");
  char* end = nullptr;
  const long long v = std::strtoll(raw.c_str(), &end, 10);
  if (end == raw.c_str() || *end != '\0')
    throw ConfigError("key " + key + ": cannot parse '" + raw + "' as an integer");
  return v;
}

bool Config::get_bool(const std::string& key) const {
  const std::string raw = raw_or_default(key, "bool");
  if (raw == "true") return true;
  if (raw == "false") return false;
  throw ConfigError("key " + key + ": expected true/false, got '" + raw + "'");
}

std::string Config::get_string(const std::string& key) const {
  return raw_or_default(key, "string");
}

std::map<std::string, std::string> Config::resolved() const {
  std::map<std::string, std::string> out;
  for (const auto& spec : config_registry()) {
    const auto it = kv_.find(spec.key);
    out[spec.key] = it != kv_.end() ? it->second : std::string(spec.default_value);
  }
  return out;
}

}  // namespace ringlat
