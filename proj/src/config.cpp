#include "tetraframe/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace tf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
  if (k.empty() || k.front() == '.' || k.back() == '.') return false;
  return std::all_of(k.begin(), k.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; });
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto where = [&] { return origin + ":" + std::to_string(lineno) + ": "; };
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where() + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!section.empty() && !valid_key(section)) throw ConfigError(where() + "invalid section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where() + "expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!section.empty()) key = section + "." + key;
    if (!valid_key(key)) throw ConfigError(where() + "invalid key '" + key + "'");
    if (cfg.entries_.count(key)) throw ConfigError(where() + "duplicate key '" + key + "'");
    cfg.entries_[key] = value;
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse(os.str(), path);
}

std::string env_name(const std::string& key, const std::string& prefix) {
  std::string out = prefix;
  for (char c : key) out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

void Config::apply_env(const std::vector<KeySpec>& schema, const std::string& prefix) {
  for (const auto& k : schema)
    if (const char* v = std::getenv(env_name(k.key, prefix).c_str())) entries_[k.key] = trim(v);
}

void Config::validate(const std::vector<KeySpec>& schema) {
  for (const auto& [key, value] : entries_) {
    const bool known = std::any_of(schema.begin(), schema.end(), [&](const KeySpec& k) { return k.key == key; });
    if (!known) throw ConfigError(origin_ + ": unknown key '" + key + "'");
  }
  for (const auto& k : schema) {
    if (entries_.count(k.key)) continue;
    if (k.required) throw MissingKeyError(origin_ + ": missing required key '" + k.key + "'");
    entries_[k.key] = k.fallback;
  }
}

std::string Config::str(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw MissingKeyError("missing key '" + key + "'");
  return it->second;
}

double Config::num(const std::string& key) const {
  const std::string v = str(key);
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE) throw ConfigError("key '" + key + "' expects a number, got '" + v + "'");
  return d;
}

long Config::integer(const std::string& key) const {
  const std::string v = str(key);
  char* end = nullptr;
  errno = 0;
  const long d = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno == ERANGE) throw ConfigError("key '" + key + "' expects an integer, got '" + v + "'");
  return d;
}

unsigned long long Config::u64(const std::string& key) const {
  const std::string v = str(key);
  char* end = nullptr;
  errno = 0;
  const unsigned long long d = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || v.front() == '-' || *end != '\0' || errno == ERANGE)
    throw ConfigError("key '" + key + "' expects an unsigned integer, got '" + v + "'");
  return d;
}

bool Config::flag(const std::string& key) const {
  const std::string v = str(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "' expects true or false, got '" + v + "'");
}

namespace {

std::vector<KeySpec> relax_schema(bool three_d) {
  std::vector<KeySpec> s = {
      {"domain.shape", true, "", "disk R | ball R | triangle_with_hole R rh [cx cy] | box_minus_ball L r | rectangle lx ly"},
      {"domain.h", true, "", "grid spacing"},
      {"field.eps", true, "", "bulk penalty length"},
      {"field.delta1", false, "0.02", "normal-containment penalty length (weak mode)"},
      {"field.delta2", false, "0.02", "boundary potential penalty length (weak mode)"},
      {"field.bc", false, three_d ? "weak" : "strong", "strong | weak | free"},
      {"bc.data", false, "normal_aligned", "seed spec evaluated on boundary nodes (strong mode)"},
      {"init", true, "", "seed spec for the initial field"},
      {"init.noise", false, "0", "uniform noise amplitude added to active nodes"},
      {"seed", false, "0", "RNG seed for the noise"},
      {"solver.dt", false, "0", "time step; 0 selects the stability default"},
      {"solver.max_iters", true, "", "iteration cap"},
      {"solver.min_iters", false, "0", "iterations before convergence is tested"},
      {"solver.tol", false, "1e-8", "relative energy decrease over the window"},
      {"solver.window", false, "100", "convergence window"},
      {"solver.energy_every", false, "1", "energy evaluation stride"},
      {"threads", false, "1", "worker threads"},
      {"checkpoint_every", false, "0", "checkpoint stride (0 disables)"},
      {"analysis.w_threshold", false, "0", "singular threshold; 0 selects half of W(0)"},
      {"output.vtk", false, "true", "write field.vtk"},
      {"output.csv", false, "true", "write field.csv"},
  };
  if (!three_d) s.push_back({"mode", true, "", "mb | tetra"});
  return s;
}

}  // namespace

const std::vector<KeySpec>& schema_for(const std::string& command) {
  static const std::vector<KeySpec> r2 = relax_schema(false);
  static const std::vector<KeySpec> r3 = relax_schema(true);
  static const std::vector<KeySpec> an = {
      {"input", true, "", "checkpoint file"},
      {"analysis.w_threshold", false, "0", "singular threshold; 0 selects half of W(0)"},
      {"analysis.margin_min", false, "2", "smallest loop margin in cells"},
      {"analysis.margin_max", false, "8", "largest loop margin in cells"},
      {"analysis.boundary_offset", false, "2.5", "offset of boundary loops in cells"},
      {"analysis.surface_samples", false, "20000", "sphere samples for the surface reduction"},
      {"analysis.probe", false, "", "x y z r: junction probe sphere"},
      {"threads", false, "1", "worker threads"},
      {"seed", false, "0", "unused; accepted for uniformity"},
      {"checkpoint_every", false, "0", "unused; accepted for uniformity"},
  };
  static const std::vector<KeySpec> bc = {
      {"alpha", false, "", "single evaluation: alpha"},
      {"beta", false, "", "single evaluation: beta"},
      {"sweep.alpha_min", false, "0.2", ""},
      {"sweep.alpha_max", false, "2", ""},
      {"sweep.beta_min", false, "-1.8333333333333333", ""},
      {"sweep.beta_max", false, "2", ""},
      {"sweep.n", false, "20", "grid points per axis"},
      {"starts", false, "24", "BFGS starts per point"},
      {"tol", false, "1e-6", "relative agreement tolerance"},
      {"threads", false, "1", "unused; accepted for uniformity"},
      {"seed", false, "1", "RNG seed for the starts"},
      {"checkpoint_every", false, "0", "unused; accepted for uniformity"},
  };
  if (command == "relax2d") return r2;
  if (command == "relax3d") return r3;
  if (command == "analyze") return an;
  if (command == "bentcore") return bc;
  throw std::invalid_argument("no config schema for " + command);
}

}  // namespace tf
