#include "config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace gapcert::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string qualified(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(t.c_str(), &end);
  return errno == 0 && end == t.c_str() + t.size() && std::isfinite(out);
}

bool parse_int(const std::string& s, int64_t& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtoll(t.c_str(), &end, 10);
  return errno == 0 && end == t.c_str() + t.size();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

}  // namespace

const Schema& schema() {
  static const Schema s = [] {
    const KeySpec real{Kind::Real, {}}, pos{Kind::Positive, {}}, integer{Kind::Int, {}}, reals{Kind::RealList, {}},
        ints{Kind::IntList, {}}, text{Kind::Text, {}}, flag{Kind::Text, {"true", "false"}};
    Schema m;
    m[""] = {{"task", {Kind::Text, {"certify", "families", "edlab", "filters", "report"}}}, {"seed", integer}, {"out", text}};
    m["constants"] = {{"c_W", pos}, {"c_Wt", pos}, {"c_D", pos}};
    m["certify"] = {{"family", {Kind::Text, {"semi-hyperbolic", "stacked", "hyperbolic", "stretched"}}},
                    {"a", reals},
                    {"alpha", pos},
                    {"beta", pos},
                    {"gamma_const", pos},
                    {"d", ints},
                    {"rho_factor", pos},
                    {"eps1", real},
                    {"rho_power", pos},
                    {"grid", reals},
                    {"J", pos},
                    {"mu", pos},
                    {"slope_threshold", real},
                    {"bounded_variation", pos},
                    {"intervals", integer}};
    m["families"] = {{"kind", {Kind::Text, {"toric", "subdivide", "stacked", "code"}}},
                     {"l1", integer},
                     {"l2", integer},
                     {"l", integer},
                     {"d", integer},
                     {"code", text},
                     {"distance_cap", integer},
                     {"radius_cap", integer}};
    m["edlab"] = {{"task", {Kind::Text, {"spectrum", "intervals", "transport", "indist", "relbound", "lr"}}},
                  {"code", text},
                  {"toric", ints},
                  {"field_x", real},
                  {"field_z", real},
                  {"s_grid", reals},
                  {"levels", integer},
                  {"bJ", pos},
                  {"delta", pos},
                  {"shift_to_ground", flag},
                  {"steps", ints},
                  {"s_end", pos},
                  {"min_gap", pos},
                  {"residual_tol", pos},
                  {"slope_tol", pos},
                  {"relbound_b", reals},
                  {"trials", integer},
                  {"lr_t", reals},
                  {"lr_mu", pos},
                  {"eig_tol", pos}};
    m["filters"] = {{"gamma", pos},       {"n_terms", integer},   {"trunc_tol", pos}, {"t_samples", reals},
                    {"omega", reals},     {"stop_band", pos},     {"w_hat_tol", pos}, {"W_hat_tol", pos},
                    {"W0_tol", pos},      {"tail_triples", integer}};
    return m;
  }();
  return s;
}

std::vector<double> parse_real_list(const std::string& s) {
  std::string t = trim(s);
  bool log10 = false;
  if (t.rfind("log10:", 0) == 0) {
    log10 = true;
    t = t.substr(6);
  }
  std::vector<double> out;
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    double a, b, step;
    if (parts.size() != 3 || !parse_double(parts[0], a) || !parse_double(parts[1], b) || !parse_double(parts[2], step))
      throw UsageError("bad range '" + s + "': expected start:stop:step");
    if (!(step > 0) || b < a) throw UsageError("bad range '" + s + "': need step > 0 and stop >= start");
    const auto n = static_cast<int64_t>(std::floor((b - a) / step + 1e-9));
    if (n > 1000000) throw UsageError("range '" + s + "' is too long");
    for (int64_t i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
  } else {
    for (const auto& p : split(t, ',')) {
      double v;
      if (!parse_double(p, v)) throw UsageError("bad number '" + p + "' in list '" + s + "'");
      out.push_back(v);
    }
  }
  if (out.empty()) throw UsageError("empty list '" + s + "'");
  if (log10)
    for (double& v : out) v = std::pow(10.0, v);
  return out;
}

void validate_value(const std::string& section, const std::string& key, const std::string& value) {
  const auto& sc = schema();
  const auto sit = sc.find(section);
  if (sit == sc.end()) throw UsageError("unknown section [" + section + "]");
  const auto kit = sit->second.find(key);
  if (kit == sit->second.end()) throw UsageError("unknown key '" + qualified(section, key) + "'");
  const KeySpec& spec = kit->second;
  const std::string name = qualified(section, key);
  double d;
  int64_t i;
  switch (spec.kind) {
    case Kind::Text:
      if (value.empty()) throw UsageError(name + ": empty value");
      if (!spec.choices.empty() && std::find(spec.choices.begin(), spec.choices.end(), value) == spec.choices.end())
        throw UsageError(name + ": '" + value + "' is not one of the allowed values");
      break;
    case Kind::Real:
      if (!parse_double(value, d)) throw UsageError(name + ": expected a number, got '" + value + "'");
      break;
    case Kind::Positive:
      if (!parse_double(value, d)) throw UsageError(name + ": expected a number, got '" + value + "'");
      if (!(d > 0)) throw UsageError(name + ": must be positive");
      break;
    case Kind::Int:
      if (!parse_int(value, i)) throw UsageError(name + ": expected an integer, got '" + value + "'");
      if (key == "seed" && i < 0) throw UsageError("seed must be nonnegative");
      break;
    case Kind::RealList:
      try {
        parse_real_list(value);
      } catch (const UsageError& e) {
        throw UsageError(name + ": " + e.what());
      }
      break;
    case Kind::IntList:
      for (const auto& p : split(value, ','))
        if (!parse_int(p, i)) throw UsageError(name + ": expected integers, got '" + value + "'");
      break;
  }
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw UsageError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty() || !schema().count(section)) throw UsageError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw UsageError(where + "missing key");
    if (c.has(section, key)) throw UsageError(where + "duplicate key '" + qualified(section, key) + "'");
    try {
      validate_value(section, key, value);
    } catch (const UsageError& e) {
      throw UsageError(where + e.what());
    }
    c.v_[section][key] = value;
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto it = v_.find(section);
  return it != v_.end() && it->second.count(key);
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  validate_value(section, key, trim(value));
  v_[section][key] = trim(value);
}

std::string Config::text(const std::string& section, const std::string& key, const std::string& def) const {
  return has(section, key) ? v_.at(section).at(key) : def;
}

double Config::real(const std::string& section, const std::string& key, double def) const {
  if (!has(section, key)) return def;
  double d = 0;
  parse_double(v_.at(section).at(key), d);
  return d;
}

int64_t Config::integer(const std::string& section, const std::string& key, int64_t def) const {
  if (!has(section, key)) return def;
  int64_t i = 0;
  parse_int(v_.at(section).at(key), i);
  return i;
}

std::vector<double> Config::reals(const std::string& section, const std::string& key,
                                  const std::vector<double>& def) const {
  return has(section, key) ? parse_real_list(v_.at(section).at(key)) : def;
}

std::vector<int64_t> Config::integers(const std::string& section, const std::string& key,
                                      const std::vector<int64_t>& def) const {
  if (!has(section, key)) return def;
  std::vector<int64_t> out;
  for (const auto& p : split(v_.at(section).at(key), ',')) {
    int64_t i = 0;
    parse_int(p, i);
    out.push_back(i);
  }
  return out;
}

std::optional<uint64_t> Config::seed() const {
  if (!has("", "seed")) return std::nullopt;
  return static_cast<uint64_t>(integer("", "seed", 0));
}

uint64_t Config::require_seed(const std::string& why) const {
  const auto s = seed();
  if (!s) throw UsageError("a seed is required for " + why + " (set 'seed' or pass --seed)");
  return *s;
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [section, kv] : v_) {
    if (kv.empty()) continue;
    if (!section.empty()) out += "[" + section + "]\n";
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  }
  return out;
}

std::string Config::sha256() const { return sha256_hex(canonical()); }

std::vector<std::pair<std::string, std::string>> parse_constants(const std::string& s) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& item : split(s, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--constants expects name=value, got '" + item + "'");
    const std::string k = trim(item.substr(0, eq)), v = trim(item.substr(eq + 1));
    validate_value("constants", k, v);
    out.emplace_back(k, v);
  }
  return out;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace gapcert::cli
