#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cbcli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_ident(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

void check_value(const KeySpec& k, const std::string& v) {
  switch (k.type) {
    case ValueType::kReal:
      parse_real(v);
      break;
    case ValueType::kCount: {
      std::size_t out = 0;
      const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
      if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw ConfigError("'" + k.name + "' expects a non-negative integer, got '" + v + "'");
      break;
    }
    case ValueType::kBool:
      if (v != "true" && v != "false" && v != "1" && v != "0")
        throw ConfigError("'" + k.name + "' expects true or false, got '" + v + "'");
      break;
    case ValueType::kRealList:
      parse_reals(v);
      break;
    case ValueType::kText:
      break;
  }
}

}  // namespace

double parse_real(const std::string& s) {
  const std::string t = trim(s);
  double out = 0.0;
  const char* first = t.data();
  if (!t.empty() && t[0] == '+') ++first;
  const auto r = std::from_chars(first, t.data() + t.size(), out);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size() || !std::isfinite(out))
    throw ConfigError("not a finite real number: '" + s + "'");
  return out;
}

std::vector<double> parse_reals(const std::string& s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(item));
  return out;
}

const std::vector<KeySpec>& known_keys() {
  static const std::vector<KeySpec> keys = {
      {"clock.mass", ValueType::kReal, "1", "clock mass M"},
      {"clock.mean_momentum", ValueType::kReal, "5", "clock mean momentum <P>"},
      {"clock.position_spread", ValueType::kReal, "2", "clock position spread dX(0)"},

      {"barrier.lambda", ValueType::kReal, "1", "coupling lambda"},
      {"barrier.width", ValueType::kReal, "0.5", "barrier width X0, 0 for a delta"},
      {"barrier.pointer_coordinate", ValueType::kReal, "1", "pointer coordinate Q"},
      {"barrier.eigenvalue", ValueType::kReal, "1", "observable eigenvalue j"},

      {"pointer.resolution", ValueType::kReal, "10", "pointer resolution Delta"},
      {"pointer.points", ValueType::kCount, "4096", "points per pointer curve"},

      {"figure3.resolution", ValueType::kReal, "10", ""},
      {"figure3.alphas", ValueType::kRealList, "2,10", ""},
      {"figure4.resolution", ValueType::kReal, "5", ""},
      {"figure4.alphas", ValueType::kRealList, "10,20,30", ""},

      {"sweep.k_min", ValueType::kReal, "0.5", ""},
      {"sweep.k_max", ValueType::kReal, "10", ""},
      {"sweep.k_points", ValueType::kCount, "20", ""},
      {"sweep.widths", ValueType::kRealList, "0,0.001,0.01,0.1,1", "barrier widths; 0 is the delta limit"},
      {"sweep.pointer_coordinates", ValueType::kRealList, "0,1,4", ""},

      {"scenario.momentum", ValueType::kReal, "0", "clock momentum k for classification; 0 uses clock.mean_momentum"},
      {"scenario.mean_j", ValueType::kReal, "1", ""},
      {"scenario.delta_j", ValueType::kReal, "1", ""},
      {"scenario.omega", ValueType::kReal, "0", ""},
      {"scenario.ground_energy", ValueType::kReal, "0", ""},

      {"system.eigenvalues", ValueType::kRealList, "1,2", ""},
      {"system.amplitudes_re", ValueType::kRealList, "0.70710678118654752,0.70710678118654752", ""},
      {"system.amplitudes_im", ValueType::kRealList, "", "empty means all zero"},
      {"system.p0", ValueType::kReal, "1", "post-selected pointer momentum P0"},

      {"momentum.mean_k", ValueType::kReal, "10", ""},
      {"momentum.sigma_k", ValueType::kReal, "1", ""},
      {"momentum.offset", ValueType::kReal, "0", ""},

      {"propagate.x0", ValueType::kReal, "-15", ""},
      {"propagate.total_time", ValueType::kReal, "6", ""},
      {"propagate.dt", ValueType::kReal, "1.25e-4", ""},
      {"propagate.grid_points", ValueType::kCount, "8192", ""},
      {"propagate.half_width", ValueType::kReal, "0", "0 picks flight distance plus 12 final spreads"},
      {"propagate.leak_tolerance", ValueType::kReal, "0", "0 keeps 1e-8"},
      {"propagate.snapshots", ValueType::kRealList, "", ""},

      {"validate.unitarity_samples", ValueType::kCount, "1000", ""},
      {"validate.seed", ValueType::kCount, "20240531", ""},
      {"validate.include_propagator", ValueType::kBool, "true", ""},

      {"run.out", ValueType::kText, "out", "output directory"},
      {"run.tol", ValueType::kReal, "1e-10", "quadrature tolerance"},
      {"run.oracle", ValueType::kBool, "false", "quadrature instead of the closed form"},
  };
  return keys;
}

RunConfig::RunConfig() {
  for (const auto& k : known_keys()) values_[k.name] = k.fallback;
}

const KeySpec& RunConfig::spec(const std::string& name) const {
  for (const auto& k : known_keys())
    if (k.name == name) return k;
  throw ConfigError("unknown key '" + name + "'");
}

void RunConfig::set(const std::string& name, const std::string& value) {
  const KeySpec& k = spec(name);
  const std::string v = trim(value);
  check_value(k, v);
  values_[name] = v;
}

void RunConfig::load_text(const std::string& text, const std::string& origin) {
  std::stringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const auto where = origin + ":" + std::to_string(lineno) + ": ";
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!valid_ident(section)) throw ConfigError(where + "bad section name '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (section.empty()) throw ConfigError(where + "key '" + key + "' outside any section");
    if (!valid_ident(key)) throw ConfigError(where + "bad key '" + key + "'");
    const std::string name = section + "." + key;
    if (seen.count(name))
      throw ConfigError(where + "duplicate key '" + name + "' (first on line " +
                        std::to_string(seen[name]) + ")");
    seen[name] = lineno;
    try {
      set(name, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  load_text(ss.str(), path);
}

double RunConfig::real(const std::string& name) const {
  spec(name);
  return parse_real(values_.at(name));
}

std::size_t RunConfig::count(const std::string& name) const {
  spec(name);
  const std::string& v = values_.at(name);
  std::size_t out = 0;
  std::from_chars(v.data(), v.data() + v.size(), out);
  return out;
}

bool RunConfig::flag(const std::string& name) const {
  spec(name);
  const std::string& v = values_.at(name);
  return v == "true" || v == "1";
}

std::vector<double> RunConfig::reals(const std::string& name) const {
  spec(name);
  return parse_reals(values_.at(name));
}

const std::string& RunConfig::text(const std::string& name) const {
  spec(name);
  return values_.at(name);
}

std::string RunConfig::dump() const {
  std::string out;
  std::string section;
  for (const auto& [name, value] : values_) {
    const auto dot = name.find('.');
    const std::string s = name.substr(0, dot);
    if (s != section) {
      if (!section.empty()) out += "\n";
      out += "[" + s + "]\n";
      section = s;
    }
    out += name.substr(dot + 1) + " = " + value + "\n";
  }
  return out;
}

}  // namespace cbcli
