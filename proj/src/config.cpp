#include "oldb/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace oldb {

const std::vector<std::string> kExperiments = {"decay",     "energy",   "lipschitz", "picard",
                                               "lorentz3d", "noncorot", "lifespan",  "toolbox"};

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(const ExperimentConfig& c, int line) {
  return (c.origin.empty() ? "<string>" : c.origin) + ":" + std::to_string(line) + ": ";
}

double to_double(const ExperimentConfig& c, const std::string& key, const std::string& v, int line) {
  if (v == "inf") return std::numeric_limits<double>::infinity();
  double x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError(where(c, line) + "malformed number for " + key + ": '" + v + "'");
  return x;
}

long long to_int(const ExperimentConfig& c, const std::string& key, const std::string& v, int line) {
  long long x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError(where(c, line) + "malformed integer for " + key + ": '" + v + "'");
  return x;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::vector<double> to_list(const ExperimentConfig& c, const std::string& key, const std::string& v, int line) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(to_double(c, key, s, line));
  if (out.empty()) throw ConfigError(where(c, line) + "empty list for " + key);
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> m = [] {
    std::map<std::string, Setter> s;
    auto dbl = [&](const std::string& key, double ExperimentConfig::*f) {
      s[key] = [key, f](ExperimentConfig& c, const std::string& v, int l) { c.*f = to_double(c, key, v, l); };
    };
    auto par = [&](const std::string& key, double Params::*f) {
      s[key] = [key, f](ExperimentConfig& c, const std::string& v, int l) { c.params.*f = to_double(c, key, v, l); };
    };
    auto ini = [&](const std::string& key, double InitialDataSpec::*f) {
      s[key] = [key, f](ExperimentConfig& c, const std::string& v, int l) { c.init.*f = to_double(c, key, v, l); };
    };
    auto integer = [&](const std::string& key, auto assign) {
      s[key] = [key, assign](ExperimentConfig& c, const std::string& v, int l) { assign(c, to_int(c, key, v, l)); };
    };
    s["experiment"] = [](ExperimentConfig& c, const std::string& v, int) { c.experiment = v; };
    s["output"] = [](ExperimentConfig& c, const std::string& v, int) { c.output = v; };
    s["initial_data.kind"] = [](ExperimentConfig& c, const std::string& v, int) { c.init.kind = v; };
    integer("grid.d", [](ExperimentConfig& c, long long x) { c.d = static_cast<int>(x); });
    integer("grid.N", [](ExperimentConfig& c, long long x) { c.N = static_cast<int>(x); });
    dbl("grid.L", &ExperimentConfig::L);
    par("params.nu", &Params::nu);
    par("params.a", &Params::a);
    par("params.mu", &Params::mu);
    par("params.b", &Params::b);
    integer("params.friedrichs_n", [](ExperimentConfig& c, long long x) { c.params.friedrichs_n = static_cast<int>(x); });
    dbl("time.dt", &ExperimentConfig::dt);
    dbl("time.T", &ExperimentConfig::T);
    integer("time.sample_every", [](ExperimentConfig& c, long long x) { c.sample_every = static_cast<int>(x); });
    integer("initial_data.seed", [](ExperimentConfig& c, long long x) {
      if (x < 0) throw ConfigError("negative seed");
      c.init.seed = static_cast<std::uint64_t>(x);
    });
    ini("initial_data.amplitude", &InitialDataSpec::amplitude);
    ini("initial_data.tau_amplitude", &InitialDataSpec::tau_amplitude);
    integer("initial_data.q0", [](ExperimentConfig& c, long long x) { c.init.q0 = static_cast<int>(x); });
    integer("initial_data.q1", [](ExperimentConfig& c, long long x) { c.init.q1 = static_cast<int>(x); });
    integer("initial_data.block", [](ExperimentConfig& c, long long x) { c.init.block = static_cast<int>(x); });
    integer("initial_data.count", [](ExperimentConfig& c, long long x) { c.count = static_cast<int>(x); });
    dbl("epsilon", &ExperimentConfig::epsilon);
    dbl("diag.p", &ExperimentConfig::diag_p);
    integer("picard.n_max", [](ExperimentConfig& c, long long x) { c.picard_n_max = static_cast<int>(x); });
    s["noncorot.mu"] = [](ExperimentConfig& c, const std::string& v, int l) {
      c.mu_values = to_list(c, "noncorot.mu", v, l);
    };
    s["lipschitz.shear"] = [](ExperimentConfig& c, const std::string& v, int l) {
      c.shear = to_list(c, "lipschitz.shear", v, l);
    };
    integer("lipschitz.shear_N", [](ExperimentConfig& c, long long x) { c.shear_N = static_cast<int>(x); });
    return s;
  }();
  return m;
}

int line_of(const ExperimentConfig& c, const std::string& key) {
  auto it = c.lines.find(key);
  if (it != c.lines.end()) return it->second;
  it = c.lines.find("experiment");
  return it != c.lines.end() ? it->second : 0;
}

}  // namespace

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value, int line) {
  const auto& s = setters();
  const auto it = s.find(key);
  if (it == s.end()) throw ConfigError(where(c, line) + "unknown key '" + key + "'");
  if (value.empty()) throw ConfigError(where(c, line) + "missing value for " + key);
  try {
    it->second(c, value, line);
  } catch (const ConfigError& e) {
    const std::string m = e.what();
    if (m.rfind(where(c, line), 0) == 0) throw;
    throw ConfigError(where(c, line) + m);
  }
  c.lines[key] = line;
}

void ExperimentConfig::validate() const {
  auto fail = [&](const std::string& key, const std::string& msg) {
    throw ConfigError(where(*this, line_of(*this, key)) + msg);
  };
  if (experiment.empty()) fail("experiment", "missing 'experiment'");
  if (std::find(kExperiments.begin(), kExperiments.end(), experiment) == kExperiments.end())
    fail("experiment", "unknown experiment '" + experiment + "'");
  if (d != 2 && d != 3) fail("grid.d", "grid.d must be 2 or 3");
  if (N < 16 || N % 2 != 0) fail("grid.N", "grid.N must be even and >= 16");
  if (!(L > 0)) fail("grid.L", "grid.L must be positive");
  if (!(params.nu > 0)) fail("params.nu", "params.nu must be positive");
  if (!(params.a >= 0)) fail("params.a", "params.a must be >= 0");
  if (!(params.mu >= 0)) fail("params.mu", "params.mu must be >= 0");
  if (!(params.b >= -1 && params.b <= 1)) fail("params.b", "params.b must lie in [-1, 1]");
  if (params.friedrichs_n < 0) fail("params.friedrichs_n", "params.friedrichs_n must be >= 0");
  if (!(dt >= 0)) fail("time.dt", "time.dt must be >= 0");
  if (!(T >= 0)) fail("time.T", "time.T must be >= 0");
  if (sample_every < 1) fail("time.sample_every", "time.sample_every must be >= 1");
  if (!(init.amplitude >= 0)) fail("initial_data.amplitude", "amplitude must be >= 0");
  if (!(init.tau_amplitude >= 0)) fail("initial_data.tau_amplitude", "tau_amplitude must be >= 0");
  if (init.kind != "taylor-green" && init.kind != "random-band" && init.kind != "single-block")
    fail("initial_data.kind", "unknown initial data generator '" + init.kind + "'");
  if (init.q1 < init.q0) fail("initial_data.q1", "initial_data.q1 must be >= q0");
  if (count < 1) fail("initial_data.count", "initial_data.count must be >= 1");
  if (!(epsilon > 0)) fail("epsilon", "epsilon must be positive");
  if (!(diag_p >= 1)) fail("diag.p", "diag.p must be >= 1");
  if (picard_n_max < 1) fail("picard.n_max", "picard.n_max must be >= 1");
  for (double m : mu_values)
    if (!(m > 0)) fail("noncorot.mu", "noncorot.mu entries must be positive");
  for (double m : shear)
    if (!(m > 0)) fail("lipschitz.shear", "lipschitz.shear entries must be positive");
  if (shear_N < 16 || shear_N % 2 != 0) fail("lipschitz.shear_N", "lipschitz.shear_N must be even and >= 16");
  if (output.empty()) fail("output", "output must not be empty");

  if (experiment == "decay") {
    if (params.b != 0) fail("params.b", "decay requires params.b = 0");
    if (params.mu != 0) fail("params.mu", "decay requires params.mu = 0");
  }
  if (experiment == "energy") {
    if (params.b != 0) fail("params.b", "energy requires params.b = 0");
    if (!(params.mu > 0)) fail("params.mu", "energy requires params.mu > 0");
  }
  if (experiment == "lipschitz") {
    if (d != 2) fail("grid.d", "lipschitz requires grid.d = 2");
    if (params.mu != 0 || params.b != 0) fail(params.mu != 0 ? "params.mu" : "params.b", "lipschitz requires mu = b = 0");
  }
  if (experiment == "picard") {
    if (diag_p != d) fail("diag.p", "picard requires diag.p = grid.d");
    if (params.mu != 0 || params.b != 0) fail(params.mu != 0 ? "params.mu" : "params.b", "picard requires mu = b = 0");
  }
  if (experiment == "lorentz3d") {
    if (d != 3) fail("grid.d", "lorentz3d requires grid.d = 3");
    if (params.mu != 0 || params.b != 0) fail(params.mu != 0 ? "params.mu" : "params.b", "lorentz3d requires mu = b = 0");
  }
  if (experiment == "noncorot") {
    const bool any_mu = params.mu > 0 || !mu_values.empty();
    if (!any_mu && params.b == 0) fail("params.mu", "noncorot requires mu > 0 or b != 0");
  }
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  ExperimentConfig c;
  c.origin = origin;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(where(c, line) + "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(where(c, line) + "empty key");
    if (c.lines.count(key)) throw ConfigError(where(c, line) + "duplicate key '" + key + "'");
    if (key.rfind("sweep.", 0) == 0) {
      const std::string target = key.substr(6);
      const auto items = split_list(value);
      if (items.empty() || std::any_of(items.begin(), items.end(), [](const auto& v) { return v.empty(); }))
        throw ConfigError(where(c, line) + "malformed sweep list for " + target);
      if (target.rfind("sweep.", 0) == 0 || target == "experiment" || !setters().count(target))
        throw ConfigError(where(c, line) + "unknown sweep key '" + target + "'");
      ExperimentConfig probe = c;
      for (const auto& v : items) set_config_value(probe, target, v, line);
      c.sweep.emplace_back(target, items);
      c.lines[key] = line;
      continue;
    }
    set_config_value(c, key, value, line);
  }
  c.validate();
  for (const auto& [key, items] : c.sweep)
    for (const auto& v : items) {
      ExperimentConfig probe = c;
      set_config_value(probe, key, v, c.lines.at("sweep." + key));
      probe.validate();
    }
  return c;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& c) {
  std::vector<ExperimentConfig> out{c};
  out.front().sweep.clear();
  for (const auto& [key, items] : c.sweep) {
    std::vector<ExperimentConfig> next;
    for (const auto& base : out)
      for (const auto& v : items) {
        ExperimentConfig e = base;
        set_config_value(e, key, v, c.lines.at("sweep." + key));
        e.output = base.output + "/" + key + "=" + v;
        next.push_back(std::move(e));
      }
    out = std::move(next);
  }
  for (auto& e : out) e.validate();
  return out;
}

double resolve_dt(const ExperimentConfig& c, const SimState& init) {
  if (c.dt > 0) return c.dt;
  if (c.T == 0) return 0.01;
  const double umax = max_abs(magnitude(init.u));
  double dt = 0.01;
  if (umax > 0) dt = std::min(dt, 0.2 * init.grid().spacing() / umax);
  return c.T / std::ceil(c.T / dt - 1e-9);
}

}  // namespace oldb
