#include "chns/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "chns/error.hpp"

namespace chns {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view v, const std::string& key) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": expected a number, got '" + std::string(v) + "'");
  return x;
}

long long to_integer(std::string_view v, const std::string& key) {
  long long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": expected an integer, got '" + std::string(v) + "'");
  return x;
}

int to_int(std::string_view v, const std::string& key) {
  const long long x = to_integer(v, key);
  if (x < -(1LL << 31) || x >= (1LL << 31)) throw ConfigError(key + ": integer out of range");
  return static_cast<int>(x);
}

using Setter = std::function<void(AppConfig&, std::string_view, const std::string&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto num = [&t](const char* key, double* (*field)(AppConfig&)) {
      t[key] = [field](AppConfig& c, std::string_view v, const std::string& k) { *field(c) = to_double(v, k); };
    };
    auto integer = [&t](const char* key, int* (*field)(AppConfig&)) {
      t[key] = [field](AppConfig& c, std::string_view v, const std::string& k) { *field(c) = to_int(v, k); };
    };
    integer("grid.nx", [](AppConfig& c) { return &c.run.grid.nx; });
    integer("grid.ny", [](AppConfig& c) { return &c.run.grid.ny; });
    num("grid.lx", [](AppConfig& c) { return &c.run.grid.lx; });
    num("grid.ly", [](AppConfig& c) { return &c.run.grid.ly; });
    num("params.nu1", [](AppConfig& c) { return &c.run.params.nu1; });
    num("params.nu2", [](AppConfig& c) { return &c.run.params.nu2; });
    num("params.theta", [](AppConfig& c) { return &c.run.params.potential.theta; });
    num("params.theta0", [](AppConfig& c) { return &c.run.params.potential.theta0; });
    num("params.chi", [](AppConfig& c) { return &c.run.params.chi; });
    num("params.alpha", [](AppConfig& c) { return &c.run.params.alpha; });
    num("params.beta", [](AppConfig& c) { return &c.run.params.beta; });
    num("params.c0", [](AppConfig& c) { return &c.run.params.c0; });
    num("params.gamma", [](AppConfig& c) { return &c.run.params.gamma; });
    t["params.potential"] = [](AppConfig& c, std::string_view v, const std::string& k) {
      if (v == "logarithmic") {
        c.run.params.potential.kind = PotentialKind::logarithmic;
      } else if (v == "quartic") {
        c.run.params.potential.kind = PotentialKind::quartic;
      } else {
        throw ConfigError(k + ": expected 'logarithmic' or 'quartic', got '" + std::string(v) + "'");
      }
    };
    num("time.dt", [](AppConfig& c) { return &c.run.dt; });
    num("time.t_end", [](AppConfig& c) { return &c.run.t_end; });
    num("time.cfl_safety", [](AppConfig& c) { return &c.run.cfl_safety; });
    t["scenario.name"] = [](AppConfig& c, std::string_view v, const std::string&) { c.run.scenario.name = v; };
    num("scenario.noise", [](AppConfig& c) { return &c.run.scenario.noise; });
    t["scenario.phi_mean"] = [](AppConfig& c, std::string_view v, const std::string& k) {
      c.run.scenario.phi_mean = to_double(v, k);
    };
    num("scenario.sigma_mean", [](AppConfig& c) { return &c.run.scenario.sigma_mean; });
    t["scenario.radius"] = [](AppConfig& c, std::string_view v, const std::string& k) {
      c.run.scenario.radius = to_double(v, k);
    };
    num("scenario.amplitude", [](AppConfig& c) { return &c.run.scenario.amplitude; });
    t["scenario.seed"] = [](AppConfig& c, std::string_view v, const std::string& k) {
      const long long s = to_integer(v, k);
      if (s < 0) throw ConfigError(k + ": seed must be >= 0");
      c.run.seed = static_cast<std::uint64_t>(s);
    };
    integer("output.cadence", [](AppConfig& c) { return &c.run.cadence; });
    num("solver.rel_tol", [](AppConfig& c) { return &c.run.solver.rel_tol; });
    integer("solver.max_iter", [](AppConfig& c) { return &c.run.solver.max_iter; });
    t["solver.mode"] = [](AppConfig& c, std::string_view v, const std::string& k) {
      if (v == "iterative") {
        c.run.solver.mode = SolverMode::iterative;
      } else if (v == "dense") {
        c.run.solver.mode = SolverMode::dense;
      } else {
        throw ConfigError(k + ": expected 'iterative' or 'dense'");
      }
    };
    num("solver.newton_tol", [](AppConfig& c) { return &c.run.newton.tol; });
    integer("solver.newton_max_iter", [](AppConfig& c) { return &c.run.newton.max_iter; });
    num("stationary.rel_tol", [](AppConfig& c) { return &c.stationary.rel_tol; });
    integer("stationary.max_iter", [](AppConfig& c) { return &c.stationary.max_iter; });
    num("check.tol", [](AppConfig& c) { return &c.check_tol; });
    return t;
  }();
  return table;
}

void assign(AppConfig& cfg, const std::string& key, std::string_view value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown key '" + key + "'");
  if (value.empty()) throw ConfigError(key + ": missing value");
  it->second(cfg, value, key);
}

void finish(AppConfig& cfg) {
  try {
    cfg.run.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (!(cfg.check_tol >= 0.0)) throw ConfigError("check.tol must be >= 0");
  if (!(cfg.stationary.rel_tol > 0.0)) throw ConfigError("stationary.rel_tol must be > 0");
  if (cfg.stationary.max_iter < 1) throw ConfigError("stationary.max_iter must be >= 1");
}

}  // namespace

AppConfig parse_config_text(std::string_view text, const std::vector<std::string>& overrides,
                            const std::string& origin) {
  AppConfig cfg;
  std::map<std::string, int> seen;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    auto fail = [&](const std::string& msg) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + msg);
    };
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) fail("empty section name");
      static const char* const known[] = {"grid", "params", "time", "scenario", "output", "solver", "stationary", "check"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known))
        fail("unknown section '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected 'key = value'");
    if (section.empty()) fail("key outside of any section");
    const std::string key = section + "." + std::string(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    try {
      assign(cfg, key, value);
    } catch (const ConfigError& e) {
      fail(e.what());
    }
    if (const auto it = seen.find(key); it != seen.end()) {
      warn(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key + "' (first set on line " +
           std::to_string(it->second) + "); the last value wins");
    }
    seen[key] = line_no;
    if (end == text.size()) break;
  }
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "': expected section.key=value");
    const std::string key(trim(std::string_view(o).substr(0, eq)));
    try {
      assign(cfg, key, trim(std::string_view(o).substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("override '" + o + "': " + e.what());
    }
  }
  finish(cfg);
  return cfg;
}

AppConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), overrides, path);
}

}  // namespace chns
