#include "dfsim/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dfsim/errors.hpp"

namespace dfsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + v + "' is not a number");
  }
  if (pos != v.size()) throw ConfigError("key '" + key + "': '" + v + "' is not a number");
  return x;
}

}  // namespace

KeyValues KeyValues::parse(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(n) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(n) + ": empty key");
    if (!kv.values_.emplace(key, value).second)
      throw ConfigError("line " + std::to_string(n) + ": duplicate key '" + key + "'");
  }
  return kv;
}

KeyValues KeyValues::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

std::optional<std::string> KeyValues::text(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  used_.insert(key);
  return it->second;
}

double KeyValues::number(const std::string& key, double fallback) const {
  auto v = text(key);
  return v ? to_double(key, *v) : fallback;
}

long long KeyValues::integer(const std::string& key, long long fallback) const {
  auto v = text(key);
  if (!v) return fallback;
  const double x = to_double(key, *v);
  if (x != std::floor(x) || std::abs(x) > 9.0e15)
    throw ConfigError("key '" + key + "': '" + *v + "' is not an integer");
  return static_cast<long long>(x);
}

bool KeyValues::flag(const std::string& key, bool fallback) const {
  auto v = text(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError("key '" + key + "': '" + *v + "' is not a boolean");
}

std::vector<double> KeyValues::numbers(const std::string& key, std::vector<double> fallback) const {
  auto v = text(key);
  if (!v) return fallback;
  std::vector<double> out;
  std::istringstream in(*v);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("key '" + key + "': empty list entry");
    out.push_back(to_double(key, item));
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

void KeyValues::require_all_used() const {
  std::string unknown;
  for (const auto& [k, v] : values_)
    if (!used_.count(k)) unknown += (unknown.empty() ? "" : ", ") + k;
  if (!unknown.empty()) throw ConfigError("unknown config keys: " + unknown);
}

ExperimentConfig experiment_from(const KeyValues& kv) {
  ExperimentConfig c;
  c.gamma = kv.number("gamma", c.gamma);
  if (kv.has("mu") && kv.has("mu_eta")) throw ConfigError("give either mu or mu_eta, not both");
  c.eta = kv.number("eta", c.eta);
  c.mu = kv.number("mu", c.mu);
  if (kv.has("mu_eta")) c.mu = kv.number("mu_eta", 0.0) / c.eta;
  c.transmittance = kv.number("T", c.transmittance);
  c.eta_g = kv.number("eta_G", c.eta_g);
  c.dark_e = kv.number("dark_E", c.dark_e);
  c.dark_f = kv.number("dark_F", c.dark_f);
  c.dark_g = kv.number("dark_G", c.dark_g);
  c.s0 = kv.number("s0", c.s0);
  c.sigma_um = kv.number("sigma_um", c.sigma_um);
  c.delay_um = kv.number("delay_um", c.delay_um);
  c.gp_reflectance = kv.number("gp_reflectance", c.gp_reflectance);
  if (kv.has("phases") && kv.has("phase_steps"))
    throw ConfigError("give either phases or phase_steps, not both");
  c.phases = kv.numbers("phases", c.phases);
  if (kv.has("phase_steps")) {
    const long long n = kv.integer("phase_steps", 8);
    if (n < 1) throw ConfigError("phase_steps must be positive");
    c.phases.clear();
    for (long long k = 0; k < n; ++k) c.phases.push_back(2.0 * std::numbers::pi * k / n);
  }
  c.phase_delta = kv.number("phase_delta", c.phase_delta);
  c.cutoff = static_cast<int>(kv.integer("cutoff", c.cutoff));
  c.pair_cutoff = static_cast<int>(kv.integer("pair_cutoff", c.pair_cutoff));
  if (auto v = kv.text("variant")) c.variant = parse_variant(*v);
  if (auto v = kv.text("source")) c.source = parse_source(*v);
  c.alpha = {kv.number("alpha_re", c.alpha.real()), kv.number("alpha_im", c.alpha.imag())};
  c.beta = {kv.number("beta_re", c.beta.real()), kv.number("beta_im", c.beta.imag())};
  c.include_dbar_branch = kv.flag("include_dbar", c.include_dbar_branch);
  c.rep_rate_hz = kv.number("rep_rate_hz", c.rep_rate_hz);
  c.validate();
  return c;
}

}  // namespace dfsim
