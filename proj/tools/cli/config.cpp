#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "hardy/errors.hpp"

namespace hardy::cli {

namespace {

const std::set<std::string> kBlockKeys = {
    "domain.dim", "domain.sigma_kind", "domain.k",    "domain.r_sigma", "domain.radius",
    "spectral.mu", "grid.h",           "grid.refine", "grid.symmetry",  "experiment.kind",
    "experiment.seed"};

const std::map<std::string, std::set<std::string>>& experiment_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"spectral", {}},
      {"green-check", {"points", "max_spread"}},
      {"martin-check", {"xi", "max_spread"}},
      {"weaknorm", {"atom", "kappa", "gamma"}},
      {"iterate", {"p", "rho", "sigma", "atom", "nu_atom", "dump_fields"}},
      {"sweep", {"data", "p_list", "couplings", "atom", "bisect", "collapse_tol", "rel_tol"}},
      {"capacity", {"alpha", "s", "b", "theta", "targets", "points"}},
      {"bvivier", {"kernel", "kappa", "points", "samples"}},
      {"boundary-concentration", {"p", "depths", "y_star"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigurationError("invalid integer for " + key + ": " + value);
  return v;
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : experiment_keys()) k.push_back(name);
    return k;
  }();
  return kinds;
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigurationError("invalid number for " + key + ": " + value);
  }
  if (pos != value.size()) throw ConfigurationError("invalid number for " + key + ": " + value);
  return v;
}

Point parse_point(const std::string& key, const std::string& value, int dim) {
  const auto parts = split(value, ',');
  if (static_cast<int>(parts.size()) != dim)
    throw ConfigurationError(key + " needs " + std::to_string(dim) + " coordinates");
  Point p(dim);
  for (int i = 0; i < dim; ++i) p[i] = parse_double(key, parts[i]);
  return p;
}

bool ExperimentConfig::has(const std::string& name) const { return entries.count("experiment." + name) > 0; }

std::string ExperimentConfig::str(const std::string& name) const {
  const auto it = entries.find("experiment." + name);
  if (it == entries.end()) throw ConfigurationError("missing key experiment." + name);
  return it->second;
}

std::string ExperimentConfig::str(const std::string& name, const std::string& fallback) const {
  return has(name) ? str(name) : fallback;
}

double ExperimentConfig::num(const std::string& name, double fallback) const {
  return has(name) ? parse_double("experiment." + name, str(name)) : fallback;
}

int ExperimentConfig::integer(const std::string& name, int fallback) const {
  return has(name) ? parse_int("experiment." + name, str(name)) : fallback;
}

bool ExperimentConfig::flag(const std::string& name, bool fallback) const {
  if (!has(name)) return fallback;
  const std::string v = str(name);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigurationError("invalid boolean for experiment." + name + ": " + v);
}

std::vector<double> ExperimentConfig::list(const std::string& name, const std::vector<double>& fallback) const {
  if (!has(name)) return fallback;
  std::vector<double> out;
  for (const auto& part : split(str(name), ',')) out.push_back(parse_double("experiment." + name, part));
  if (out.empty()) throw ConfigurationError("empty list for experiment." + name);
  return out;
}

Point ExperimentConfig::point(const std::string& name, const Point& fallback) const {
  return has(name) ? parse_point("experiment." + name, str(name), domain.dim) : fallback;
}

std::vector<Point> ExperimentConfig::points(const std::string& name) const {
  std::vector<Point> out;
  if (!has(name)) return out;
  for (const auto& part : split(str(name), ';'))
    if (!part.empty()) out.push_back(parse_point("experiment." + name, part, domain.dim));
  return out;
}

double ExperimentConfig::level_h(int level) const { return std::ldexp(h, -level); }

SymmetrySpec ExperimentConfig::symmetry_spec() const {
  const int N = domain.dim;
  if (symmetry == "none") return SymmetrySpec::none();
  if (symmetry == "full") {
    if (domain.sigma_kind != SigmaKind::kPoint) throw ConfigurationError("grid.symmetry = full needs a point Sigma");
    return SymmetrySpec::mirrors(0, N, 0, N);
  }
  // axis: the symmetries fixing e_1 (and Sigma).
  const int pb = domain.sigma_kind == SigmaKind::kPoint ? 1 : domain.k + 1;
  return SymmetrySpec::mirrors(1, N, pb, N);
}

ExperimentConfig parse_config(const std::string& text, const std::string& kind) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigurationError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigurationError("line " + std::to_string(lineno) + ": empty key or value");
    if (!cfg.entries.emplace(key, value).second) throw ConfigurationError("duplicate key " + key);
  }

  const auto get = [&](const std::string& key) -> const std::string* {
    const auto it = cfg.entries.find(key);
    return it == cfg.entries.end() ? nullptr : &it->second;
  };

  cfg.kind = kind;
  if (const auto* k = get("experiment.kind")) {
    if (!kind.empty() && *k != kind)
      throw ConfigurationError("experiment.kind " + *k + " does not match subcommand " + kind);
    cfg.kind = *k;
  }
  if (cfg.kind.empty()) throw ConfigurationError("no experiment kind");
  const auto& kinds = experiment_keys();
  const auto kit = kinds.find(cfg.kind);
  if (kit == kinds.end()) throw ConfigurationError("unknown experiment kind " + cfg.kind);

  for (const auto& [key, _] : cfg.entries) {
    if (kBlockKeys.count(key)) continue;
    if (key.rfind("experiment.", 0) == 0 && kit->second.count(key.substr(11))) continue;
    throw ConfigurationError("unknown key " + key);
  }

  const int dim = get("domain.dim") ? parse_int("domain.dim", *get("domain.dim")) : 3;
  const double radius = get("domain.radius") ? parse_double("domain.radius", *get("domain.radius")) : 1.0;
  const std::string sk = get("domain.sigma_kind") ? *get("domain.sigma_kind") : "point";
  try {
    if (sk == "point") {
      if (get("domain.k") && parse_int("domain.k", *get("domain.k")) != 0)
        throw ConfigurationError("domain.k must be 0 for a point Sigma");
      cfg.domain = DomainSpec::point(dim, radius);
    } else if (sk == "sphere") {
      if (!get("domain.k") || !get("domain.r_sigma"))
        throw ConfigurationError("sphere Sigma needs domain.k and domain.r_sigma");
      cfg.domain = DomainSpec::sphere(dim, parse_int("domain.k", *get("domain.k")),
                                      parse_double("domain.r_sigma", *get("domain.r_sigma")), radius);
    } else {
      throw ConfigurationError("domain.sigma_kind must be point or sphere");
    }
    cfg.domain.validate();
  } catch (const PreconditionError& e) {
    throw ConfigurationError(e.what());
  }

  if (const auto* v = get("spectral.mu")) cfg.mu = parse_double("spectral.mu", *v);
  if (const auto* v = get("grid.h")) cfg.h = parse_double("grid.h", *v);
  if (const auto* v = get("grid.refine")) cfg.refine = parse_int("grid.refine", *v);
  if (const auto* v = get("grid.symmetry")) cfg.symmetry = *v;
  if (const auto* v = get("experiment.seed")) {
    std::uint64_t s = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), s);
    if (ec != std::errc() || ptr != v->data() + v->size()) throw ConfigurationError("invalid experiment.seed");
    cfg.seed = s;
  }
  if (cfg.symmetry != "none" && cfg.symmetry != "axis" && cfg.symmetry != "full")
    throw ConfigurationError("grid.symmetry must be none, axis or full");
  if (cfg.refine < 0 || cfg.refine > 4) throw ConfigurationError("grid.refine must be in [0, 4]");
  if (!(cfg.h > 0.0)) throw ConfigurationError("grid.h must be positive");
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::string& kind) {
  if (path.empty()) return parse_config("", kind);
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), kind);
}

}  // namespace hardy::cli
