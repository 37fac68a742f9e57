#include "bosecert/config.hpp"

#include "bosecert/errors.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <regex>
#include <sstream>

namespace bosecert {

using nlohmann::json;

RadialPotential PotentialSpec::build() const {
  if (kind == "square-well")
    return RadialPotential::square_well(v0, R);
  if (kind == "table")
    return load_potential_table(table);
  throw ConfigError("unknown potential kind '" + kind + "' (expected square-well or table)");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ','))
    if (auto t = trim(item); !t.empty())
      out.push_back(t);
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + s + "'");
  }
  if (used != s.size())
    throw ConfigError("expected a number, got '" + s + "'");
  return x;
}

long long to_int(const std::string& s) {
  const double x = to_double(s);
  if (x != std::floor(x))
    throw ConfigError("expected an integer, got '" + s + "'");
  return static_cast<long long>(x);
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes")
    return true;
  if (s == "false" || s == "0" || s == "no")
    return false;
  throw ConfigError("expected a boolean, got '" + s + "'");
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return s.substr(1, s.size() - 2);
  return s;
}

std::vector<double> to_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& t : split_list(s))
    out.push_back(to_double(t));
  return out;
}

std::vector<int> to_ints(const std::string& s) {
  std::vector<int> out;
  for (const auto& t : split_list(s))
    out.push_back(static_cast<int>(to_int(t)));
  return out;
}

// `{kind: "square-well", v0: 2, R: 1}` -> JSON by quoting the bare keys.
void parse_potential_inline(const std::string& s, PotentialSpec& p) {
  static const std::regex bare_key(R"(([\{,]\s*)([A-Za-z_][A-Za-z0-9_]*)\s*:)");
  const std::string quoted = std::regex_replace(s, bare_key, "$1\"$2\":");
  json j;
  try {
    j = json::parse(quoted);
  } catch (const json::exception&) {
    throw ConfigError("malformed potential '" + s + "'");
  }
  if (!j.is_object())
    throw ConfigError("potential must be an object");
  for (const auto& [k, v] : j.items()) {
    if (k == "kind" && v.is_string())
      p.kind = v.get<std::string>();
    else if (k == "v0" && v.is_number())
      p.v0 = v.get<double>();
    else if (k == "R" && v.is_number())
      p.R = v.get<double>();
    else if (k == "table" && v.is_string())
      p.table = v.get<std::string>();
    else
      throw ConfigError("unknown or mistyped potential field '" + k + "'");
  }
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> m = [] {
    std::map<std::string, Setter> t;
    auto num = [&](const char* key, auto field) {
      t[key] = [field](RunConfig& c, const std::string& v) { field(c) = to_double(v); };
    };
    t["potential"] = [](RunConfig& c, const std::string& v) {
      parse_potential_inline(v, c.potential);
    };
    t["potential.kind"] = [](RunConfig& c, const std::string& v) { c.potential.kind = unquote(v); };
    t["potential.table"] = [](RunConfig& c, const std::string& v) {
      c.potential.table = unquote(v);
    };
    num("potential.v0", [](RunConfig& c) -> double& { return c.potential.v0; });
    num("potential.R", [](RunConfig& c) -> double& { return c.potential.R; });
    num("steepness", [](RunConfig& c) -> double& { return c.steepness; });
    t["rho_mu"] = [](RunConfig& c, const std::string& v) { c.rho_mu = to_double(v); };
    num("rho_a3", [](RunConfig& c) -> double& { return c.rho_a3; });
    num("K", [](RunConfig& c) -> double& { return c.K; });
    num("L_over_ell", [](RunConfig& c) -> double& { return c.L_over_ell; });
    num("s", [](RunConfig& c) -> double& { return c.s; });
    num("b", [](RunConfig& c) -> double& { return c.b; });
    num("Xi", [](RunConfig& c) -> double& { return c.Xi; });
    num("delta", [](RunConfig& c) -> double& { return c.delta; });
    num("epsilon", [](RunConfig& c) -> double& { return c.epsilon; });
    num("kappa", [](RunConfig& c) -> double& { return c.kappa; });

    num("tol.scatter", [](RunConfig& c) -> double& { return c.tol.scatter; });
    num("tol.born", [](RunConfig& c) -> double& { return c.tol.born; });
    num("tol.fourier", [](RunConfig& c) -> double& { return c.tol.fourier; });
    num("tol.integrals", [](RunConfig& c) -> double& { return c.tol.integrals; });
    num("tol.sliding", [](RunConfig& c) -> double& { return c.tol.sliding; });
    num("tol.kinetic_F0", [](RunConfig& c) -> double& { return c.tol.kinetic_F0; });
    num("tol.momentum", [](RunConfig& c) -> double& { return c.tol.momentum; });
    num("tol.vertex", [](RunConfig& c) -> double& { return c.tol.vertex; });
    num("tol.c0_stability", [](RunConfig& c) -> double& { return c.tol.c0_stability; });
    num("tol.lhy", [](RunConfig& c) -> double& { return c.tol.lhy; });
    num("tol.potsplit", [](RunConfig& c) -> double& { return c.tol.potsplit; });
    num("tol.commutator", [](RunConfig& c) -> double& { return c.tol.commutator; });
    num("tol.ed", [](RunConfig& c) -> double& { return c.tol.ed; });
    num("tol.number", [](RunConfig& c) -> double& { return c.tol.number; });

    t["fourier_k"] = [](RunConfig& c, const std::string& v) { c.fourier_k = to_doubles(v); };
    t["K_list"] = [](RunConfig& c, const std::string& v) { c.K_list = to_doubles(v); };
    t["sliding_pairs"] = [](RunConfig& c, const std::string& v) {
      c.sliding_pairs = static_cast<int>(to_int(v));
    };
    t["kinetic_s"] = [](RunConfig& c, const std::string& v) { c.kinetic_s = to_doubles(v); };
    t["kinetic_b"] = [](RunConfig& c, const std::string& v) { c.kinetic_b = to_doubles(v); };
    t["kinetic_max_points"] = [](RunConfig& c, const std::string& v) {
      c.kinetic_max_points = static_cast<std::size_t>(to_int(v));
    };
    t["sweep_rho_a3"] = [](RunConfig& c, const std::string& v) { c.sweep_rho_a3 = to_doubles(v); };
    t["bogoliubov_refine"] = [](RunConfig& c, const std::string& v) {
      c.bogoliubov_refine = static_cast<int>(to_int(v));
    };
    num("C_gap", [](RunConfig& c) -> double& { return c.C_gap; });
    num("C_error", [](RunConfig& c) -> double& { return c.C_error; });
    t["strict_gap"] = [](RunConfig& c, const std::string& v) { c.strict_gap = to_bool(v); };

    num("potsplit_ell", [](RunConfig& c) -> double& { return c.potsplit_ell; });
    t["potsplit_cases"] = [](RunConfig& c, const std::string& v) {
      static const std::regex nm(R"((\d+)\s*x\s*(\d+))");
      c.potsplit_cases.clear();
      for (const auto& item : split_list(v)) {
        std::smatch m;
        if (!std::regex_match(item, m, nm))
          throw ConfigError("potsplit case '" + item + "' must look like NxM");
        c.potsplit_cases.push_back({std::stoi(m[1]), std::stoi(m[2])});
      }
    };
    t["interaction_samples"] = [](RunConfig& c, const std::string& v) {
      c.interaction_samples = static_cast<int>(to_int(v));
    };
    t["commutator_M"] = [](RunConfig& c, const std::string& v) {
      c.commutator_M = static_cast<int>(to_int(v));
    };
    t["commutator_N"] = [](RunConfig& c, const std::string& v) { c.commutator_N = to_ints(v); };

    num("ed_L", [](RunConfig& c) -> double& { return c.ed_L; });
    t["ed_N"] = [](RunConfig& c, const std::string& v) { c.ed_N = static_cast<int>(to_int(v)); };
    t["ed_cutoff"] = [](RunConfig& c, const std::string& v) {
      c.ed_cutoff = static_cast<int>(to_int(v));
    };
    t["ed_couplings"] = [](RunConfig& c, const std::string& v) { c.ed_couplings = to_doubles(v); };
    num("ed_weak_v0", [](RunConfig& c) -> double& { return c.ed_weak_v0; });
    t["eigenvector_dump"] = [](RunConfig& c, const std::string& v) {
      c.eigenvector_dump = unquote(v);
    };

    t["seed"] = [](RunConfig& c, const std::string& v) {
      std::size_t used = 0;
      try {
        c.seed = std::stoull(v, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != v.size() || v.find('-') != std::string::npos)
        throw ConfigError("seed must be a non-negative integer, got '" + v + "'");
    };
    t["output_dir"] = [](RunConfig& c, const std::string& v) { c.output_dir = unquote(v); };
    return t;
  }();
  return m;
}

} // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end())
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (value.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty value for '" + key + "'");
    try {
      it->second(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + " (" + key + "): " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f)
    throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const RunConfig& cfg) {
  const auto& t = cfg.tol;
  for (double x : {t.scatter, t.born, t.fourier, t.integrals, t.sliding, t.kinetic_F0, t.momentum,
                   t.vertex, t.c0_stability, t.lhy, t.potsplit, t.commutator, t.ed, t.number})
    if (!(x > 0.0))
      throw ConfigError("all tolerances must be positive");
  if (cfg.potential.kind == "square-well" && !(cfg.potential.v0 > 0.0 && cfg.potential.R > 0.0))
    throw ConfigError("square well needs v0 > 0 and R > 0");
  if (!(cfg.steepness >= 0.05 && cfg.steepness <= 20.0))
    throw ConfigError("steepness must lie in [0.05, 20]");
  if (!(cfg.Xi >= 3.0))
    throw ConfigError("Xi >= 3 violated: the particle partition needs groups of at least "
                      "Xi*rho*ell^3 particles");
  if (!(cfg.L_over_ell > 2.0))
    throw ConfigError("2*ell < L violated: the small boxes must fit twice into the torus "
                      "(L_over_ell > 2)");
  if (!(cfg.kappa > 0.0 && cfg.kappa < 2.0 / 3.0))
    throw ConfigError("kappa in (0, 2/3) violated: the density scaling rho ~ N^(3 kappa - 2) "
                      "needs it");
  if (!(cfg.s > 0.0 && cfg.s < 0.5) || !(cfg.b > 0.0))
    throw ConfigError("kinetic parameters need 0 < s < 1/2 and b > 0");
  if (!(cfg.delta >= 0.0) || !(cfg.epsilon >= 0.0 && cfg.epsilon <= 0.5))
    throw ConfigError("delta >= 0 and epsilon in [0, 1/2] are required");
  if (cfg.rho_mu && !(*cfg.rho_mu > 0.0))
    throw ConfigError("rho_mu must be positive");
  if (!(cfg.rho_a3 > 0.0))
    throw ConfigError("rho_a3 must be positive");
  if (!(cfg.K > 1.0))
    throw ConfigError("K > 1 is required");
  for (double k : cfg.K_list)
    if (!(k > 1.0))
      throw ConfigError("every K in K_list must exceed 1");
  if (cfg.fourier_k.empty() || cfg.K_list.empty() || cfg.kinetic_s.empty() ||
      cfg.kinetic_b.empty() || cfg.sweep_rho_a3.empty() || cfg.potsplit_cases.empty() ||
      cfg.commutator_N.empty() || cfg.ed_couplings.size() < 2)
    throw ConfigError("sweep lists must be non-empty (ed_couplings needs at least two values)");
  for (double x : cfg.sweep_rho_a3)
    if (!(x > 0.0))
      throw ConfigError("sweep_rho_a3 entries must be positive");
  for (const auto& [n, m] : cfg.potsplit_cases)
    if (n < 2 || n > 3 || m < 2)
      throw ConfigError("potsplit cases need N in {2, 3} and M >= 2");
  if (cfg.sliding_pairs < 1 || cfg.interaction_samples < 1 || cfg.bogoliubov_refine < 1)
    throw ConfigError("sliding_pairs, interaction_samples and bogoliubov_refine must be >= 1");
  if (cfg.ed_N < 1 || cfg.ed_cutoff < 1 || !(cfg.ed_L > 0.0) || cfg.commutator_M < 2)
    throw ConfigError("ED needs N >= 1, cutoff >= 1, L > 0; commutator_M >= 2");
  if (!(cfg.potsplit_ell >= 2.0 * cfg.potential.R) && cfg.potential.kind == "square-well")
    throw ConfigError("R <= ell/2 violated for the lattice box (potsplit_ell >= 2R)");
}

ResolvedGeometry resolve_geometry(const RunConfig& cfg, double a, double R, double rho_a3,
                                  double K) {
  ResolvedGeometry g;
  g.a = a;
  g.rho_mu = cfg.rho_mu ? *cfg.rho_mu : rho_a3 / (a * a * a);
  g.ell = 1.0 / (K * std::sqrt(g.rho_mu * a));
  g.L = cfg.L_over_ell * g.ell;
  if (!(R < 0.5 * g.ell))
    throw ConfigError("R <= ell/2 violated (R = " + std::to_string(R) +
                      ", ell = " + std::to_string(g.ell) +
                      "): the interaction range must sit well inside the small box");
  if (!(2.0 * g.ell < g.L))
    throw ConfigError("2*ell < L violated");
  return g;
}

json RunConfig::to_json() const {
  json pot{{"kind", potential.kind}, {"v0", potential.v0}, {"R", potential.R}};
  if (!potential.table.empty())
    pot["table"] = potential.table;
  json cases = json::array();
  for (const auto& [n, m] : potsplit_cases)
    cases.push_back({n, m});
  json j{{"potential", pot},
         {"steepness", steepness},
         {"rho_a3", rho_a3},
         {"K", K},
         {"L_over_ell", L_over_ell},
         {"s", s},
         {"b", b},
         {"Xi", Xi},
         {"delta", delta},
         {"epsilon", epsilon},
         {"kappa", kappa},
         {"tol",
          {{"scatter", tol.scatter},
           {"born", tol.born},
           {"fourier", tol.fourier},
           {"integrals", tol.integrals},
           {"sliding", tol.sliding},
           {"kinetic_F0", tol.kinetic_F0},
           {"momentum", tol.momentum},
           {"vertex", tol.vertex},
           {"c0_stability", tol.c0_stability},
           {"lhy", tol.lhy},
           {"potsplit", tol.potsplit},
           {"commutator", tol.commutator},
           {"ed", tol.ed},
           {"number", tol.number}}},
         {"fourier_k", fourier_k},
         {"K_list", K_list},
         {"sliding_pairs", sliding_pairs},
         {"kinetic_s", kinetic_s},
         {"kinetic_b", kinetic_b},
         {"kinetic_max_points", kinetic_max_points},
         {"sweep_rho_a3", sweep_rho_a3},
         {"bogoliubov_refine", bogoliubov_refine},
         {"C_gap", C_gap},
         {"C_error", C_error},
         {"strict_gap", strict_gap},
         {"potsplit_ell", potsplit_ell},
         {"potsplit_cases", cases},
         {"interaction_samples", interaction_samples},
         {"commutator_M", commutator_M},
         {"commutator_N", commutator_N},
         {"ed_L", ed_L},
         {"ed_N", ed_N},
         {"ed_cutoff", ed_cutoff},
         {"ed_couplings", ed_couplings},
         {"ed_weak_v0", ed_weak_v0},
         {"seed", seed}};
  if (rho_mu)
    j["rho_mu"] = *rho_mu;
  return j;
}

} // namespace bosecert
