#include "polyext/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>

#include "polyext/kernel.hpp"
#include "polyext/orders.hpp"
#include "polyext/specfun.hpp"

namespace polyext {

using nlohmann::json;

namespace {

using Params = std::vector<std::pair<std::string, std::string>>;

std::string fmt(double v) { return format_double(v); }

const json& default_doc() {
  static const json doc = json::parse(R"cfg({
    "groups": ["constants", "kernel", "energy", "dtn", "taylor", "limits", "recursion", "hardy", "ibp", "boundedness"],
    "tol_scale": 1.0,
    "exec": "serial",
    "grid": {"rho_min": 1e-4, "rho_max": 40.0, "panels_per_decade": 8, "order": 12},
    "y_quadrature": {"y_max": 2000.0, "h0": 1e-6, "panels_per_decade": 8, "order": 12},
    "polar": {"r_max": 14.0, "h0": 1e-5, "panels_per_decade": 6, "order": 16, "theta_panels": 8},
    "tolerances": {
      "constants": 1e-12, "kappa_fd": 1e-6,
      "kernel_ft": 1e-6, "closed_form": 1e-10, "identity": 1e-10, "mass": 1e-8,
      "energy": 1e-2, "bessel": 1e-6, "scaling": 1e-3,
      "monotone": 1.0, "dtn_final": 1e-2, "dtn_oracle": 1e-8,
      "taylor_leading": 5e-2, "taylor_ratio": 0.3, "trace_ratio": 0.15, "taylor_paths": 1e-6,
      "limits": 1e-2, "recursion_closed": 1e-12, "recursion": 1e-8,
      "hardy_slack": 0.02, "hardy_value": 1e-2,
      "step1": 1e-6, "orthogonality": 1e-3, "normal_flux": 1e-2,
      "spread": 10.0
    },
    "kernel": {
      "ft": [[1, 0.3], [1, 0.5], [2, 0.75], [2, 1.5]],
      "ft_rho": [0.0, 0.05, 0.3, 1.0, 2.5, 6.0],
      "mass": [[1, 0.3], [2, 0.75], [3, 1.5]],
      "identity_alpha": [0.4, 1.3, 2.6],
      "identity_b": [-0.6, 0.0, 0.5],
      "identity_points": [[0.7, 0.4], [0.7, 1.0], [1.5, 2.0]]
    },
    "energy": {
      "cases": [{"family": "gaussian", "n": 2, "s": 0.5}, {"family": "gaussian", "n": 4, "s": 1.5},
                {"family": "slater", "n": 6, "s": 2.5}],
      "bessel": [{"n": 2, "s": 0.3}, {"n": 2, "s": 0.75}, {"n": 4, "s": 1.5}, {"n": 6, "s": 2.5}],
      "alpha_cross": [{"n": 4, "s": 1.5, "alpha": 2.5}],
      "profile_b": [-0.5, 0.0, 0.4],
      "scaling_lambda": 1.7
    },
    "dtn": {
      "cases": [{"family": "gaussian", "n": 2, "s": 0.5}, {"family": "gaussian", "n": 4, "s": 1.5}],
      "j_first": 3, "j_last": 10
    },
    "taylor": {
      "cases": [{"family": "gaussian", "n": 4, "s": 1.5}],
      "y": 0.05,
      "ladder": [0.1, 0.05, 0.025, 0.0125]
    },
    "limits": {
      "cases": [{"family": "gaussian", "n": 4, "s": 1.5, "m": 1}, {"family": "gaussian", "n": 6, "s": 2.5, "m": 1},
                {"family": "gaussian", "n": 6, "s": 2.5, "m": 2}],
      "y": 1e-3
    },
    "recursion": {
      "cases": [{"n": 4, "s": 1.5, "m": 1}, {"n": 6, "s": 2.5, "m": 1}, {"n": 6, "s": 2.5, "m": 2}],
      "y": [0.05, 0.3, 2.0]
    },
    "hardy": {
      "params": [{"n": 2, "k": 1, "a": 0.0, "b": 0.0}, {"n": 3, "k": 1, "a": 0.5, "b": -0.4},
                 {"n": 4, "k": 2, "a": 0.0, "b": 0.0}, {"n": 3, "k": 2, "a": 0.0, "b": 0.5}],
      "fields": ["gaussian", "anisotropic", "bump"]
    },
    "ibp": {
      "step1": [{"n": 3, "k": 2, "b": 0.5}, {"n": 3, "k": 3, "b": 0.5}, {"n": 4, "k": 4, "b": -0.3}],
      "orthogonality": [{"family": "gaussian", "n": 4, "s": 1.5}, {"family": "gaussian", "n": 3, "s": 0.6}],
      "normal_flux": [{"family": "gaussian", "n": 4, "s": 1.5, "m": 1}],
      "flux_y": [1e-3, 1e-4]
    },
    "boundedness": {
      "cases": [{"family": "gaussian", "n": 2, "s": 0.5}, {"family": "gaussian", "n": 4, "s": 1.5},
                {"family": "poly_gaussian(1)", "n": 4, "s": 1.5}]
    }
  })cfg");
  return doc;
}

// ---- validation ----------------------------------------------------------

class Validator {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  bool number(const json& v, const std::string& path, double lo = -1e300, double hi = 1e300) {
    if (!v.is_number()) {
      fail(path, "expected a number");
      return false;
    }
    const double x = v.get<double>();
    if (!(x >= lo && x <= hi)) {
      fail(path, "value " + fmt(x) + " outside [" + fmt(lo) + ", " + fmt(hi) + "]");
      return false;
    }
    return true;
  }

  bool positive(const json& v, const std::string& path) {
    if (!number(v, path)) return false;
    if (!(v.get<double>() > 0.0)) {
      fail(path, "must be positive");
      return false;
    }
    return true;
  }

  bool integer(const json& v, const std::string& path, long lo, long hi) {
    if (!v.is_number_integer()) {
      fail(path, "expected an integer");
      return false;
    }
    const long x = v.get<long>();
    if (x < lo || x > hi) {
      fail(path, "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return false;
    }
    return true;
  }

  bool array(const json& v, const std::string& path) {
    if (!v.is_array()) {
      fail(path, "expected an array");
      return false;
    }
    return true;
  }

  bool object(const json& v, const std::string& path, const std::set<std::string>& keys) {
    if (!v.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    bool ok = true;
    for (const auto& [k, _] : v.items())
      if (!keys.count(k)) {
        fail(path + "." + k, "unknown key");
        ok = false;
      }
    for (const auto& k : keys)
      if (!v.contains(k)) {
        fail(path + "." + k, "missing");
        ok = false;
      }
    return ok;
  }

  void family(const json& v, const std::string& path) {
    if (!v.is_string()) return fail(path, "expected a family name");
    try {
      SpectralFamily::parse(v.get<std::string>());
    } catch (const std::exception& e) {
      fail(path, e.what());
    }
  }

  // {family?, n, s, m?} with make_order admissibility
  void order_case(const json& c, const std::string& path, bool with_family, bool with_m, bool with_alpha = false) {
    std::set<std::string> keys{"n", "s"};
    if (with_family) keys.insert("family");
    if (with_m) keys.insert("m");
    if (with_alpha) keys.insert("alpha");
    if (!object(c, path, keys)) return;
    if (with_family) family(c["family"], path + ".family");
    const bool ok_n = integer(c["n"], path + ".n", 1, 64);
    const bool ok_s = positive(c["s"], path + ".s");
    if (!ok_n || !ok_s) return;
    const int n = c["n"].get<int>();
    const double s = c["s"].get<double>();
    FractionalOrder o;
    try {
      o = make_order(n, s);
    } catch (const std::exception& e) {
      return fail(path, "s=" + fmt(s) + ", n=" + std::to_string(n) + " not admissible: " + e.what());
    }
    if (with_m && integer(c["m"], path + ".m", 1, 64) && c["m"].get<int>() > o.int_part)
      fail(path + ".m", "must satisfy 1 <= m <= [s] = " + std::to_string(o.int_part));
    if (with_alpha) positive(c["alpha"], path + ".alpha");
  }

  template <typename F>
  void each(const json& v, const std::string& path, F f) {
    if (!array(v, path)) return;
    for (std::size_t i = 0; i < v.size(); ++i) f(v[i], path + "[" + std::to_string(i) + "]");
  }
};

void validate(const json& d, Validator& V) {
  V.each(d["groups"], "$.groups", [&](const json& g, const std::string& p) {
    const auto& k = known_groups();
    if (!g.is_string() || std::find(k.begin(), k.end(), g.get<std::string>()) == k.end())
      V.fail(p, "unknown group " + g.dump());
  });
  V.positive(d["tol_scale"], "$.tol_scale");
  if (!d["exec"].is_string() || (d["exec"] != "serial" && d["exec"] != "parallel"))
    V.fail("$.exec", "expected \"serial\" or \"parallel\"");

  const auto& g = d["grid"];
  if (V.object(g, "$.grid", {"rho_min", "rho_max", "panels_per_decade", "order"})) {
    V.positive(g["rho_min"], "$.grid.rho_min");
    V.positive(g["rho_max"], "$.grid.rho_max");
    V.integer(g["panels_per_decade"], "$.grid.panels_per_decade", 1, 64);
    V.integer(g["order"], "$.grid.order", 2, 64);
    if (g["rho_min"].is_number() && g["rho_max"].is_number() && !(g["rho_min"] < g["rho_max"]))
      V.fail("$.grid", "need rho_min < rho_max");
  }
  const auto& y = d["y_quadrature"];
  if (V.object(y, "$.y_quadrature", {"y_max", "h0", "panels_per_decade", "order"})) {
    V.positive(y["y_max"], "$.y_quadrature.y_max");
    V.positive(y["h0"], "$.y_quadrature.h0");
    V.integer(y["panels_per_decade"], "$.y_quadrature.panels_per_decade", 1, 64);
    V.integer(y["order"], "$.y_quadrature.order", 2, 64);
  }
  const auto& pl = d["polar"];
  if (V.object(pl, "$.polar", {"r_max", "h0", "panels_per_decade", "order", "theta_panels"})) {
    V.positive(pl["r_max"], "$.polar.r_max");
    V.positive(pl["h0"], "$.polar.h0");
    V.integer(pl["panels_per_decade"], "$.polar.panels_per_decade", 1, 64);
    V.integer(pl["order"], "$.polar.order", 2, 64);
    V.integer(pl["theta_panels"], "$.polar.theta_panels", 1, 256);
  }
  const auto& tol = d["tolerances"];
  std::set<std::string> tol_keys;
  for (const auto& [k, _] : default_doc()["tolerances"].items()) tol_keys.insert(k);
  if (V.object(tol, "$.tolerances", tol_keys))
    for (const auto& [k, v] : tol.items()) V.number(v, "$.tolerances." + k, 0.0);

  const auto& k = d["kernel"];
  if (V.object(k, "$.kernel", {"ft", "ft_rho", "mass", "identity_alpha", "identity_b", "identity_points"})) {
    auto pair = [&](const json& p, const std::string& path, bool ft) {
      if (!V.array(p, path) || p.size() != 2) return V.fail(path, "expected [n, alpha]");
      if (V.integer(p[0], path + "[0]", 1, 64) && ft && p[0].get<int>() > 2)
        V.fail(path + "[0]", "direct transform implemented for n in {1, 2}");
      V.positive(p[1], path + "[1]");
    };
    V.each(k["ft"], "$.kernel.ft", [&](const json& p, const std::string& path) { pair(p, path, true); });
    V.each(k["ft_rho"], "$.kernel.ft_rho", [&](const json& v, const std::string& p) { V.number(v, p, 0.0, 50.0); });
    V.each(k["mass"], "$.kernel.mass", [&](const json& p, const std::string& path) { pair(p, path, false); });
    V.each(k["identity_alpha"], "$.kernel.identity_alpha",
           [&](const json& v, const std::string& p) { V.positive(v, p); });
    V.each(k["identity_b"], "$.kernel.identity_b", [&](const json& v, const std::string& p) {
      if (V.number(v, p) && !(v.get<double>() > -1.0 && v.get<double>() < 1.0)) V.fail(p, "need -1 < b < 1");
    });
    V.each(k["identity_points"], "$.kernel.identity_points", [&](const json& v, const std::string& p) {
      if (!V.array(v, p) || v.size() != 2) return V.fail(p, "expected [r, y]");
      V.number(v[0], p + "[0]", 0.0);
      V.positive(v[1], p + "[1]");
    });
  }

  const auto& e = d["energy"];
  if (V.object(e, "$.energy", {"cases", "bessel", "alpha_cross", "profile_b", "scaling_lambda"})) {
    V.each(e["cases"], "$.energy.cases", [&](const json& c, const std::string& p) { V.order_case(c, p, true, false); });
    V.each(e["bessel"], "$.energy.bessel",
           [&](const json& c, const std::string& p) { V.order_case(c, p, false, false); });
    V.each(e["alpha_cross"], "$.energy.alpha_cross",
           [&](const json& c, const std::string& p) { V.order_case(c, p, false, false, true); });
    V.each(e["profile_b"], "$.energy.profile_b", [&](const json& v, const std::string& p) {
      if (V.number(v, p) && !(v.get<double>() > -1.0 && v.get<double>() < 1.0)) V.fail(p, "need -1 < b < 1");
    });
    if (V.positive(e["scaling_lambda"], "$.energy.scaling_lambda") && e["scaling_lambda"] == 1.0)
      V.fail("$.energy.scaling_lambda", "must differ from 1");
  }
  const auto& dt = d["dtn"];
  if (V.object(dt, "$.dtn", {"cases", "j_first", "j_last"})) {
    V.each(dt["cases"], "$.dtn.cases", [&](const json& c, const std::string& p) { V.order_case(c, p, true, false); });
    if (V.integer(dt["j_first"], "$.dtn.j_first", 0, 40) && V.integer(dt["j_last"], "$.dtn.j_last", 0, 40) &&
        dt["j_last"].get<int>() <= dt["j_first"].get<int>())
      V.fail("$.dtn", "need j_first < j_last");
  }
  const auto& ty = d["taylor"];
  if (V.object(ty, "$.taylor", {"cases", "y", "ladder"})) {
    V.each(ty["cases"], "$.taylor.cases", [&](const json& c, const std::string& p) {
      V.order_case(c, p, true, false);
      if (c.is_object() && c.contains("family") && c["family"] == "zero") V.fail(p + ".family", "zero has no remainder");
    });
    V.positive(ty["y"], "$.taylor.y");
    V.each(ty["ladder"], "$.taylor.ladder", [&](const json& v, const std::string& p) { V.positive(v, p); });
    if (ty["ladder"].is_array() && ty["ladder"].empty()) V.fail("$.taylor.ladder", "must not be empty");
  }
  const auto& li = d["limits"];
  if (V.object(li, "$.limits", {"cases", "y"})) {
    V.each(li["cases"], "$.limits.cases", [&](const json& c, const std::string& p) { V.order_case(c, p, true, true); });
    V.positive(li["y"], "$.limits.y");
  }
  const auto& re = d["recursion"];
  if (V.object(re, "$.recursion", {"cases", "y"})) {
    V.each(re["cases"], "$.recursion.cases",
           [&](const json& c, const std::string& p) { V.order_case(c, p, false, true); });
    V.each(re["y"], "$.recursion.y", [&](const json& v, const std::string& p) { V.positive(v, p); });
  }
  const auto& ha = d["hardy"];
  if (V.object(ha, "$.hardy", {"params", "fields"})) {
    V.each(ha["params"], "$.hardy.params", [&](const json& c, const std::string& p) {
      if (!V.object(c, p, {"n", "k", "a", "b"})) return;
      if (!(V.integer(c["n"], p + ".n", 1, 64) & V.integer(c["k"], p + ".k", 1, 8) & V.number(c["a"], p + ".a") &
            V.number(c["b"], p + ".b")))
        return;
      const HardyParams hp{c["n"].get<int>(), c["k"].get<int>(), c["a"].get<double>(), c["b"].get<double>()};
      if (!hp.admissible()) V.fail(p, "inadmissible Hardy parameters " + hp.describe());
    });
    V.each(ha["fields"], "$.hardy.fields", [&](const json& v, const std::string& p) {
      if (!(v == "gaussian" || v == "anisotropic" || v == "bump"))
        V.fail(p, "unknown field " + v.dump() + " (gaussian, anisotropic, bump)");
    });
  }
  const auto& ib = d["ibp"];
  if (V.object(ib, "$.ibp", {"step1", "orthogonality", "normal_flux", "flux_y"})) {
    V.each(ib["step1"], "$.ibp.step1", [&](const json& c, const std::string& p) {
      if (!V.object(c, p, {"n", "k", "b"})) return;
      V.integer(c["n"], p + ".n", 1, 64);
      V.integer(c["k"], p + ".k", 2, 8);
      if (V.number(c["b"], p + ".b") && !(c["b"].get<double>() > -1.0 && c["b"].get<double>() < 1.0))
        V.fail(p + ".b", "need -1 < b < 1");
    });
    V.each(ib["orthogonality"], "$.ibp.orthogonality",
           [&](const json& c, const std::string& p) { V.order_case(c, p, true, false); });
    V.each(ib["normal_flux"], "$.ibp.normal_flux", [&](const json& c, const std::string& p) {
      if (!V.object(c, p, {"family", "n", "s", "m"})) return;
      V.family(c["family"], p + ".family");
      if (!(V.integer(c["n"], p + ".n", 1, 64) & V.positive(c["s"], p + ".s") & V.integer(c["m"], p + ".m", 1, 8)))
        return;
      try {
        const auto o = make_order(c["n"].get<int>(), c["s"].get<double>());
        if (2 * c["m"].get<int>() > o.extension_order()) V.fail(p + ".m", "need m <= (1+[s])/2");
      } catch (const std::exception& ex) {
        V.fail(p, std::string("not admissible: ") + ex.what());
      }
    });
    V.each(ib["flux_y"], "$.ibp.flux_y", [&](const json& v, const std::string& p) { V.positive(v, p); });
  }
  const auto& bo = d["boundedness"];
  if (V.object(bo, "$.boundedness", {"cases"}))
    V.each(bo["cases"], "$.boundedness.cases", [&](const json& c, const std::string& p) {
      V.order_case(c, p, true, false);
      if (c.is_object() && c.contains("family") && c["family"] == "slater")
        V.fail(p + ".family", "slater decays too slowly in rho for the Hankel inversion");
    });
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string s = "invalid configuration";
        for (const auto& p : problems) s += "\n  " + p;
        return s;
      }()),
      problems_(std::move(problems)) {}

const std::vector<std::string>& known_groups() {
  static const std::vector<std::string> g{"constants", "kernel", "energy",    "dtn", "taylor",
                                          "limits",    "recursion", "hardy", "ibp", "boundedness"};
  return g;
}

SuiteConfig SuiteConfig::defaults() { return from_json(json::object()); }

SuiteConfig SuiteConfig::from_json(const json& user) {
  if (!user.is_object()) throw ConfigError({"$: expected a JSON object"});
  json doc = default_doc();
  std::vector<std::string> problems;
  for (const auto& [key, value] : user.items()) {
    if (!doc.contains(key)) {
      problems.push_back("$." + key + ": unknown key");
      continue;
    }
    if (doc[key].is_object() && value.is_object()) {
      for (const auto& [k2, v2] : value.items()) doc[key][k2] = v2;  // unknown k2 caught by validation
    } else {
      doc[key] = value;
    }
  }
  Validator V;
  V.errors = problems;
  validate(doc, V);
  if (!V.errors.empty()) throw ConfigError(V.errors);
  SuiteConfig c;
  c.doc = doc;
  for (const auto& g : known_groups())  // canonical order, duplicates dropped
    if (std::find(doc["groups"].begin(), doc["groups"].end(), g) != doc["groups"].end()) c.groups.push_back(g);
  c.tol_scale = doc["tol_scale"].get<double>();
  c.exec = doc["exec"] == "parallel" ? Exec::parallel : Exec::serial;
  return c;
}

SuiteConfig SuiteConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"$: cannot open config file " + path});
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("$: malformed JSON: ") + e.what()});
  }
  return from_json(j);
}

double SuiteConfig::tol(const std::string& key) const {
  if (!doc["tolerances"].contains(key)) throw DomainError("unknown tolerance class " + key);
  return doc["tolerances"][key].get<double>() * tol_scale;
}

RhoGridSpec SuiteConfig::rho_grid() const {
  const auto& g = doc["grid"];
  return {g["rho_min"].get<double>(), g["rho_max"].get<double>(), g["panels_per_decade"].get<int>(),
          g["order"].get<int>()};
}

YQuadSpec SuiteConfig::y_quadrature() const {
  const auto& g = doc["y_quadrature"];
  return {g["y_max"].get<double>(), g["h0"].get<double>(), g["panels_per_decade"].get<int>(), g["order"].get<int>()};
}

PolarSpec SuiteConfig::polar() const {
  const auto& g = doc["polar"];
  return {g["r_max"].get<double>(), g["h0"].get<double>(), g["panels_per_decade"].get<int>(), g["order"].get<int>(),
          g["theta_panels"].get<int>()};
}

std::size_t VerificationReport::passed() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const CheckValue& c) { return c.pass; }));
}

// ---- groups --------------------------------------------------------------

namespace {

class Runner {
 public:
  explicit Runner(const SuiteConfig& c) : cfg(c) {}

  const SuiteConfig& cfg;
  std::vector<CheckValue> out;

  // Evaluates fn into a check; any exception becomes a failed check carrying the message.
  void check(const std::string& name, Params params, std::optional<double> expected, double tol, Compare cmp,
             const std::function<double()>& fn) {
    try {
      out.push_back(make_check(name, std::move(params), fn(), expected, tol, cmp));
    } catch (const std::exception& e) {
      CheckValue c = make_check(name, std::move(params), std::nan(""), expected, tol, cmp);
      c.note = e.what();
      out.push_back(std::move(c));
    }
  }

  RadialSpectralFunction spectral(const json& c) const {
    return make_test_function(SpectralFamily::parse(c["family"].get<std::string>()),
                              RhoGrid::make(c["n"].get<int>(), cfg.rho_grid()));
  }

  static FractionalOrder order(const json& c) { return make_order(c["n"].get<int>(), c["s"].get<double>()); }

  static Params case_params(const json& c) {
    Params p;
    if (c.contains("family")) p.emplace_back("family", c["family"].get<std::string>());
    p.emplace_back("n", std::to_string(c["n"].get<int>()));
    p.emplace_back("s", fmt(c["s"].get<double>()));
    if (c.contains("m")) p.emplace_back("m", std::to_string(c["m"].get<int>()));
    return p;
  }

  static Params with(Params p, const std::string& k, const std::string& v) {
    p.emplace_back(k, v);
    return p;
  }
};

void group_constants(Runner& R) {
  const double t = R.cfg.tol("constants");
  for (auto [s, d] : std::vector<std::pair<double, double>>{{0.5, 1.0}, {1.5, 2.0}, {2.5, 8.0 / 3.0}})
    R.check("constants.d", {{"s", fmt(s)}}, d, t, Compare::absolute, [s] { return d_constant(s); });
  for (double s : {0.5, 1.5, 2.5})
    R.check("constants.kappa", {{"s", fmt(s)}, {"m", "0"}}, 1.0, 0.0, Compare::absolute, [s] { return kappa(s, 0); });
  R.check("constants.kappa", {{"s", "1.5"}, {"m", "1"}}, -1.0, t, Compare::absolute, [] { return kappa(1.5, 1); });
  R.check("constants.kappa", {{"s", "2.5"}, {"m", "1"}}, -1.0 / 3.0, t, Compare::absolute, [] { return kappa(2.5, 1); });
  // multiplier-series cross-check of kappa by finite differences
  const double tf = R.cfg.tol("kappa_fd");
  for (auto [s, m] : std::vector<std::pair<double, int>>{{1.5, 1}, {2.5, 1}, {2.5, 2}})
    R.check("constants.kappa_fd", {{"s", fmt(s)}, {"m", std::to_string(m)}}, kappa(s, m) / specfun::factorial(2 * m),
            tf, Compare::relative, [s, m] { return kappa_fd(s, m) / specfun::factorial(2 * m); });
}

void group_kernel(Runner& R) {
  const auto& k = R.cfg.doc["kernel"];
  std::vector<double> rho = k["ft_rho"].get<std::vector<double>>();
  for (const auto& p : k["ft"]) {
    const int n = p[0].get<int>();
    const double a = p[1].get<double>();
    R.check("kernel.ft_relative_residual", {{"n", std::to_string(n)}, {"alpha", fmt(a)}}, std::nullopt,
            R.cfg.tol("kernel_ft"), Compare::at_most, [&] {
              const auto c = kernel_ft_check(n, a, rho, 1.0);
              double worst = 0.0;
              for (std::size_t i = 0; i < rho.size(); ++i) {
                const double m = multiplier(a, rho[i]);
                worst = std::max(worst, std::abs(c.transform[i] - m) / m);
              }
              return worst;
            });
  }
  // closed forms on [1e-2, 30]
  auto closed = [](double alpha, const std::function<double(double)>& f) {
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double t = 1e-2 * std::pow(3000.0, i / 200.0);
      worst = std::max(worst, std::abs(multiplier(alpha, t) - f(t)) / f(t));
    }
    return worst;
  };
  R.check("kernel.closed_form", {{"alpha", "0.5"}}, std::nullopt, R.cfg.tol("closed_form"), Compare::at_most,
          [&] { return closed(0.5, [](double t) { return std::exp(-t); }); });
  R.check("kernel.closed_form", {{"alpha", "1.5"}}, std::nullopt, R.cfg.tol("closed_form"), Compare::at_most,
          [&] { return closed(1.5, [](double t) { return (1 + t) * std::exp(-t); }); });
  // identities over the (alpha, b, point) lattice
  const auto alphas = k["identity_alpha"].get<std::vector<double>>();
  const auto bs = k["identity_b"].get<std::vector<double>>();
  for (KernelIdentity which : {KernelIdentity::i_dy, KernelIdentity::i_delta_b, KernelIdentity::ii, KernelIdentity::iii}) {
    R.check("kernel.identity", {{"which", kernel_identity_name(which)}, {"n", "3"}}, std::nullopt, R.cfg.tol("identity"),
            Compare::at_most, [&] {
              double worst = 0.0;
              for (double a : alphas)
                for (double b : bs)
                  for (const auto& pt : k["identity_points"]) {
                    const double r = pt[0].get<double>(), y = pt[1].get<double>();
                    if ((which == KernelIdentity::ii || which == KernelIdentity::iii) && !(a > 1.0)) continue;
                    const double v = which == KernelIdentity::iii
                                         ? r1_relative_residual(which, 3, a, b, 1, r, y)
                                         : r1_residual(which, 3, a, b, 0, r, y);
                    worst = std::max(worst, v);
                  }
              return worst;
            });
  }
  for (const auto& p : k["mass"]) {
    const int n = p[0].get<int>();
    const double a = p[1].get<double>();
    R.check("kernel.mass", {{"n", std::to_string(n)}, {"alpha", fmt(a)}}, 1.0, R.cfg.tol("mass"), Compare::absolute,
            [n, a] { return kernel_mass(n, a); });
  }
}

void group_energy(Runner& R) {
  const auto& e = R.cfg.doc["energy"];
  const auto yq = R.cfg.y_quadrature();
  const double pi = std::numbers::pi;
  for (const auto& c : e["cases"]) {
    const auto params = Runner::case_params(c);
    std::optional<EnergyIdentity> id;
    R.check("energy.identity_gap", params, std::nullopt, R.cfg.tol("energy"), Compare::at_most, [&] {
      id = energy_identity(R.spectral(c), Runner::order(c), yq, R.cfg.exec);
      return id->gap;
    });
    // closed forms for the gaussian anchors
    const int n = c["n"].get<int>();
    const double s = c["s"].get<double>();
    std::optional<double> closed;
    if (c["family"] == "gaussian" && n == 2 && s == 0.5) closed = std::pow(pi, 1.5);
    if (c["family"] == "gaussian" && n == 4 && s == 1.5) closed = 7.5 * std::pow(pi, 2.5);
    if (closed)
      R.check("energy.value", params, *closed, R.cfg.tol("energy"), Compare::relative, [&] {
        if (!id) throw DomainError("energy unavailable");
        return id->energy;
      });
  }
  for (const auto& c : e["bessel"]) {
    const double s = c["s"].get<double>();
    const int n = c["n"].get<int>();
    R.check("energy.bessel_constant", Runner::case_params(c), 2.0 * d_constant(s), R.cfg.tol("bessel"),
            Compare::relative, [s, n] { return walphasumm_constant(s, s, n); });
  }
  for (const auto& c : e["alpha_cross"]) {
    const double s = c["s"].get<double>(), a = c["alpha"].get<double>();
    const int n = c["n"].get<int>();
    double cf = std::nan("");
    try {
      cf = walphasumm_constant(a, s, n, BesselMethod::closed_form);
    } catch (const std::exception&) {
    }
    R.check("energy.bessel_constant", Runner::with(Runner::case_params(c), "alpha", fmt(a)), cf, R.cfg.tol("bessel"),
            Compare::relative, [a, s, n] { return walphasumm_constant(a, s, n); });
  }
  for (const auto& bv : e["profile_b"]) {
    const double b = bv.get<double>();
    // the profile energy bounds the trace constant c_b from above; it is compared with 2 d
    R.check("energy.profile_energy", {{"b", fmt(b)}}, 2.0 * d_constant(0.5 * (1.0 - b)), R.cfg.tol("bessel"),
            Compare::relative, [b] { return trace_constant_profile(b).profile_energy; });
  }
  const double lambda = e["scaling_lambda"].get<double>();
  for (const auto& c : e["cases"]) {
    if (c["family"] == "zero") continue;
    std::optional<ScalingExponents> sc;
    const auto params = Runner::with(Runner::case_params(c), "lambda", fmt(lambda));
    const double expected = c["n"].get<int>() - 2.0 * c["s"].get<double>();
    R.check("energy.scaling_seminorm", params, expected, R.cfg.tol("scaling"), Compare::absolute, [&] {
      sc = scaling_exponents(R.spectral(c), Runner::order(c), lambda, yq, R.cfg.exec);
      return sc->seminorm;
    });
    R.check("energy.scaling_energy", params, expected, R.cfg.tol("scaling"), Compare::absolute, [&] {
      if (!sc) throw DomainError("scaling exponents unavailable");
      return sc->energy;
    });
    break;  // one representative case keeps the group fast
  }
}

void group_dtn(Runner& R) {
  const auto& d = R.cfg.doc["dtn"];
  const int j0 = d["j_first"].get<int>(), j1 = d["j_last"].get<int>();
  for (const auto& c : d["cases"]) {
    std::vector<double> v;
    const auto params = Runner::case_params(c);
    R.check("dtn.monotone_ratio", Runner::with(params, "j", std::to_string(j0) + ".." + std::to_string(j1)),
            std::nullopt, R.cfg.tol("monotone"), Compare::at_most, [&] {
              const auto u = R.spectral(c);
              const auto o = Runner::order(c);
              for (int j = j0; j <= j1; ++j) v.push_back(dtn_residual_norm(u, o, std::ldexp(1.0, -j)));
              double worst = 0.0;
              for (std::size_t i = 1; i < v.size(); ++i) worst = std::max(worst, v[i] / v[i - 1]);
              return worst;
            });
    R.check("dtn.final_over_first", params, std::nullopt, R.cfg.tol("dtn_final"), Compare::at_most, [&] {
      if (v.empty() || v.front() == 0.0) throw DomainError("majorant ladder unavailable");
      return v.back() / v.front();
    });
  }
  // 1-D oracle: 2 pi int rho^2 e^{-rho^2} (1 - e^{-y rho})^2
  const double y = 0.1;
  R.check("dtn.oracle", {{"family", "gaussian"}, {"n", "2"}, {"s", "0.5"}, {"y", fmt(y)}},
          2 * std::numbers::pi * integrate_half_line(2.0, 12.0, [y](double r) {
            const double f = 1 - std::exp(-y * r);
            return std::exp(-r * r) * f * f;
          }),
          R.cfg.tol("dtn_oracle"), Compare::relative, [&] {
            return dtn_residual_norm(make_test_function(SpectralFamily::parse("gaussian"), RhoGrid::make(2, R.cfg.rho_grid())),
                                     make_order(2, 0.5), y);
          });
}

void group_taylor(Runner& R) {
  const auto& t = R.cfg.doc["taylor"];
  const double y = t["y"].get<double>();
  const auto ladder = t["ladder"].get<std::vector<double>>();
  const double y_small = *std::min_element(ladder.begin(), ladder.end());
  for (const auto& c : t["cases"]) {
    const auto params = Runner::case_params(c);
    const auto u = R.spectral(c);
    const auto o = Runner::order(c);
    // leading fractional term: R(y) ~ Gamma(-s) / (Gamma(s) 4^s) y^{2s} (-Delta)^s u(0)
    R.check("taylor.leading_term", Runner::with(params, "y", fmt(y_small)), 1.0, R.cfg.tol("taylor_leading"),
            Compare::relative, [&] {
              const double h = y_small;
              const double lead = specfun::gamma(-o.s) / (specfun::gamma(o.s) * std::pow(4.0, o.s)) *
                                  std::pow(h, 2.0 * o.s) * eval_physical_origin(frac_laplacian(u, 2.0 * o.s));
              return taylor_remainder(u, o, h) / lead;
            });
    R.check("taylor.paths_agree", Runner::with(params, "y", fmt(y)), std::nullopt, R.cfg.tol("taylor_paths"),
            Compare::at_most, [&] {
              const double a = taylor_remainder(u, o, y, AxisPath::spectral);
              const double b = taylor_remainder(u, o, y, AxisPath::physical);
              return std::abs(a - b) / std::abs(a);
            });
    R.check("taylor.at_zero", params, 0.0, 0.0, Compare::absolute, [&] { return taylor_remainder(u, o, 0.0); });
    // remainder is O(y^{2s}) and the axis error O(y^{min(2, 2s)})
    for (double h : ladder)
      R.check("taylor.halving_ratio", Runner::with(params, "y", fmt(h)), std::pow(2.0, -2.0 * o.s),
              R.cfg.tol("taylor_ratio"), Compare::relative,
              [&] { return std::abs(taylor_remainder(u, o, 0.5 * h) / taylor_remainder(u, o, h)); });
    for (double h : ladder)
      R.check("taylor.trace_halving_ratio", Runner::with(params, "y", fmt(h)), std::pow(2.0, std::min(2.0, 2.0 * o.s)),
              R.cfg.tol("trace_ratio"), Compare::relative, [&] {
                const double u0 = eval_physical_origin(u);
                return std::abs(axis_value_spectral(u, o.s, h) - u0) / std::abs(axis_value_spectral(u, o.s, 0.5 * h) - u0);
              });
    R.check("taylor.scaled_decreasing", params, std::nullopt, R.cfg.tol("monotone"), Compare::at_most, [&] {
      // R(y) / y^{2[s]} along decades
      const double p = 2.0 * o.int_part;
      double prev = std::abs(taylor_remainder(u, o, 0.1)) / std::pow(0.1, p), worst = 0.0;
      for (double h : {1e-2, 1e-3}) {
        const double v = std::abs(taylor_remainder(u, o, h)) / std::pow(h, p);
        worst = std::max(worst, v / prev);
        prev = v;
      }
      return worst;
    });
  }
}

void group_limits(Runner& R) {
  const auto& l = R.cfg.doc["limits"];
  const double y = l["y"].get<double>();
  for (const auto& c : l["cases"]) {
    const auto params = Runner::case_params(c);
    const int m = c["m"].get<int>();
    R.check("limits.gap", Runner::with(params, "y", fmt(y)), std::nullopt, R.cfg.tol("limits"), Compare::at_most,
            [&] { return limits_gap(R.spectral(c), Runner::order(c), m, y, R.cfg.exec); });
    R.check("limits.halving_ratio", Runner::with(params, "y", fmt(y)), std::nullopt, R.cfg.tol("monotone"),
            Compare::at_most, [&] {
              const auto u = R.spectral(c);
              const auto o = Runner::order(c);
              return limits_gap(u, o, m, 0.5 * y, R.cfg.exec) / limits_gap(u, o, m, y, R.cfg.exec);
            });
  }
}

void group_recursion(Runner& R) {
  const auto& r = R.cfg.doc["recursion"];
  const auto ys = r["y"].get<std::vector<double>>();
  for (const auto& c : r["cases"]) {
    const auto o = Runner::order(c);
    const int m = c["m"].get<int>();
    const bool closed = o.s == 1.5 && m == 1;
    const auto u = make_test_function(SpectralFamily::parse("gaussian"), RhoGrid::make(o.n, R.cfg.rho_grid()));
    R.check("recursion.residual", Runner::case_params(c), std::nullopt,
            R.cfg.tol(closed ? "recursion_closed" : "recursion"), Compare::at_most, [&] {
              double worst = 0.0;
              for (double y : ys) worst = std::max(worst, recursion_residual(u, o, m, y));
              if (closed) {
                // both sides reduce to 2 e^{-t}
                const auto lhs = delta_b_tower(1.5, 0.0, 1);
                for (double y : ys)
                  for (std::size_t i = 0; i < u.grid().size(); ++i) {
                    const double t = y * u.grid().nodes[i];
                    const double want = 2.0 * std::exp(-t);
                    if (want > 0.0) worst = std::max(worst, std::abs(-lhs.eval(t) - want) / want);
                  }
              }
              return worst;
            });
  }
}

PolyExp hardy_field(const std::string& name) {
  if (name == "gaussian") return PolyExp::gaussian(0.5, 0.5);
  if (name == "anisotropic") return PolyExp::gaussian(0.5, 1.0);
  PolyExp f = PolyExp::gaussian(0.5, 0.5);
  f.add(1, 0, 1.0);
  return f;
}

void group_hardy(Runner& R) {
  const auto& h = R.cfg.doc["hardy"];
  const auto spec = R.cfg.polar();
  for (const auto& p : h["params"]) {
    const HardyParams hp{p["n"].get<int>(), p["k"].get<int>(), p["a"].get<double>(), p["b"].get<double>()};
    const double bound = std::pow(hardy_constant(hp), 2);
    for (const auto& f : h["fields"]) {
      const std::string name = f.get<std::string>();
      const Params params{{"field", name},          {"n", std::to_string(hp.n)}, {"k", std::to_string(hp.k)},
                          {"a", fmt(hp.a)},          {"b", fmt(hp.b)}};
      R.check("hardy.quotient", params, bound, R.cfg.tol("hardy_slack"), Compare::at_least, [&] {
        const auto U = PhysicalField::from_family(hp.n, hardy_field(name), {0.0}, {0.0});
        return hardy_quotient(U, hp, spec, R.cfg.exec).quotient;
      });
    }
  }
  // gaussian in d = 3: (3/2) pi^{3/2} / (2 pi^{3/2})
  R.check("hardy.gaussian_value", {{"field", "gaussian"}, {"n", "2"}, {"k", "1"}, {"a", "0"}, {"b", "0"}}, 0.75,
          R.cfg.tol("hardy_value"), Compare::relative, [&] {
            const auto U = PhysicalField::from_family(2, hardy_field("gaussian"), {0.0}, {0.0});
            return hardy_quotient(U, {2, 1, 0.0, 0.0}, spec, R.cfg.exec).quotient;
          });
}

void group_ibp(Runner& R) {
  const auto& ib = R.cfg.doc["ibp"];
  const auto spec = R.cfg.polar();
  PolyExp V = PolyExp::gaussian(1.0, 0.7);
  V.add(0, 1, 0.3);
  for (const auto& c : ib["step1"]) {
    const int n = c["n"].get<int>(), k = c["k"].get<int>();
    const double b = c["b"].get<double>();
    R.check("ibp.step1", {{"n", std::to_string(n)}, {"k", std::to_string(k)}, {"b", fmt(b)}}, std::nullopt,
            R.cfg.tol("step1"), Compare::at_most,
            [&] { return ibp_step1(PolyExp::gaussian(0.5, 0.5), V, n, k, b, spec, R.cfg.exec); });
  }
  const PolyExp trace_free = PolyExp::monomial(1.0, 0, 1, 1.0, 1.0);  // y^2 e^{-r^2-y^2}
  for (const auto& c : ib["orthogonality"])
    R.check("ibp.orthogonality", Runner::case_params(c), std::nullopt, R.cfg.tol("orthogonality"), Compare::at_most,
            [&] { return ibp_orthogonality(R.spectral(c), Runner::order(c), trace_free, R.cfg.y_quadrature(), R.cfg.exec); });
  const auto ys = ib["flux_y"].get<std::vector<double>>();
  for (const auto& c : ib["normal_flux"]) {
    const auto params = Runner::case_params(c);
    const int m = c["m"].get<int>();
    for (double y : ys)
      R.check("ibp.normal_flux", Runner::with(params, "y", fmt(y)), std::nullopt, R.cfg.tol("normal_flux"),
              Compare::at_most, [&] { return normal_flux(R.spectral(c), Runner::order(c), m, y); });
    R.check("ibp.normal_flux_decreasing", params, std::nullopt, R.cfg.tol("monotone"), Compare::at_most, [&] {
      const auto u = R.spectral(c);
      const auto o = Runner::order(c);
      double worst = 0.0;
      for (std::size_t i = 1; i < ys.size(); ++i) {
        const double hi = std::max(ys[i], ys[i - 1]), lo = std::min(ys[i], ys[i - 1]);
        worst = std::max(worst, normal_flux(u, o, m, lo) / normal_flux(u, o, m, hi));
      }
      return worst;
    });
  }
}

void group_boundedness(Runner& R) {
  for (const auto& c : R.cfg.doc["boundedness"]["cases"])
    R.check("boundedness.spread", Runner::case_params(c), std::nullopt, R.cfg.tol("spread"), Compare::at_most, [&] {
      const auto rs = boundedness_ratios(SpectralFamily::parse(c["family"].get<std::string>()), Runner::order(c), {},
                                         R.cfg.exec);
      double lo = 1e300, hi = 0.0;
      for (const auto& r : rs) {
        if (!std::isfinite(r.ratio) || !(r.ratio > 0.0)) throw DomainError("non-finite boundedness ratio");
        lo = std::min(lo, r.ratio);
        hi = std::max(hi, r.ratio);
      }
      return hi / lo;
    });
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::vector<CheckValue> run_group(const std::string& group, const SuiteConfig& config) {
  static const std::vector<std::pair<std::string, void (*)(Runner&)>> table{
      {"constants", group_constants}, {"kernel", group_kernel}, {"energy", group_energy},
      {"dtn", group_dtn},             {"taylor", group_taylor}, {"limits", group_limits},
      {"recursion", group_recursion}, {"hardy", group_hardy},   {"ibp", group_ibp},
      {"boundedness", group_boundedness}};
  for (const auto& [name, fn] : table)
    if (name == group) {
      Runner R(config);
      fn(R);
      return std::move(R.out);
    }
  throw ConfigError({"unknown group " + group});
}

VerificationReport run_suite(const SuiteConfig& config) {
  VerificationReport rep;
  rep.config = config.doc;
  rep.generated_at = utc_now();
  for (const auto& g : config.groups) {
    const auto t0 = std::chrono::steady_clock::now();
    auto checks = run_group(g, config);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.group_seconds.emplace_back(g, secs);
    for (auto& c : checks) rep.checks.push_back(std::move(c));
  }
  return rep;
}

}  // namespace polyext
