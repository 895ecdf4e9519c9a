// polyext command line: runs check groups and writes field files.
// Exit codes: 0 all checks pass, 1 some check failed, 2 usage, config or I/O error.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "polyext/extension.hpp"
#include "polyext/radial_field.hpp"
#include "polyext/report.hpp"
#include "polyext/suite.hpp"

using namespace polyext;
using nlohmann::json;

namespace {

constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Globals {
  std::string config;
  std::string out;
  std::string format = "text";
  std::optional<double> tol_scale;
};

struct CaseOpts {
  std::string family;
  std::optional<int> n;
  std::optional<double> s;
};

// Loads the config file (if any), applies --tol-scale and the per-command overrides.
SuiteConfig load_config(const Globals& g, json overrides) {
  json user = json::object();
  if (!g.config.empty()) {
    std::ifstream in(g.config);
    if (!in) throw ConfigError({"$: cannot open config file " + g.config});
    try {
      user = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError({std::string("$: malformed JSON: ") + e.what()});
    }
    if (!user.is_object()) throw ConfigError({"$: expected a JSON object"});
  }
  if (g.tol_scale) user["tol_scale"] = *g.tol_scale;
  for (auto& [k, v] : overrides.items()) {
    if (v.is_object() && user.contains(k) && user[k].is_object())
      for (auto& [k2, v2] : v.items()) user[k][k2] = v2;
    else
      user[k] = v;
  }
  return SuiteConfig::from_json(user);
}

// A single {family, n, s} case replacing the section's case list when any of the flags is given.
std::optional<json> single_case(const CaseOpts& c, const SuiteConfig& base, const std::string& section) {
  if (c.family.empty() && !c.n && !c.s) return std::nullopt;
  json k = base.doc[section]["cases"].empty() ? json{{"family", "gaussian"}, {"n", 4}, {"s", 1.5}}
                                              : base.doc[section]["cases"][0];
  if (!c.family.empty()) k["family"] = c.family;
  if (c.n) k["n"] = *c.n;
  if (c.s) k["s"] = *c.s;
  return k;
}

int emit(const VerificationReport& r, const Globals& g) {
  write_report(r, parse_report_format(g.format), g.out);
  return r.failed() ? kFail : 0;
}

VerificationReport run_groups(const SuiteConfig& cfg, const std::vector<std::string>& groups) {
  SuiteConfig c = cfg;
  c.groups = groups;
  return run_suite(c);
}

void add_case_opts(CLI::App* sub, CaseOpts& c) {
  sub->add_option("--family", c.family, "gaussian | slater | zero | poly_gaussian(j)");
  sub->add_option("--n", c.n, "trace dimension");
  sub->add_option("--s", c.s, "fractional order");
}

int field_summary(const std::string& path) {
  const FieldData f = load_field(path);
  double lo = INFINITY, hi = -INFINITY;
  for (double v : f.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::cout << "kind     " << (f.kind == FieldKind::spectral ? "spectral" : "physical") << '\n'
            << "n        " << f.n << '\n'
            << "alpha    " << format_double(f.alpha) << '\n'
            << "b        " << format_double(f.b) << '\n'
            << "x nodes  " << f.x.size() << '\n'
            << "y nodes  " << f.y.size() << '\n'
            << "rows     " << f.values.size() << '\n';
  if (!f.values.empty()) std::cout << "range    [" << format_double(lo) << ", " << format_double(hi) << "]\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polyext: polyharmonic extension checks"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "JSON suite configuration");
  app.add_option("--out", g.out, "output path (report, or field file for extend)");
  app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--tol-scale", g.tol_scale, "multiplies every tolerance")->check(CLI::PositiveNumber);

  auto* constants = app.add_subcommand("constants", "d_s, kappa and the finite-difference cross-check");
  auto* kernel = app.add_subcommand("kernel", "Poisson kernel transform, identities and mass");

  CaseOpts energy_case, dtn_case, taylor_case;
  auto* energy = app.add_subcommand("energy", "energy identity, Bessel constants, scaling");
  add_case_opts(energy, energy_case);
  auto* dtn = app.add_subcommand("dtn", "Neumann limit along y = 2^-j");
  add_case_opts(dtn, dtn_case);
  auto* taylor = app.add_subcommand("taylor", "axis expansion and trace recovery");
  add_case_opts(taylor, taylor_case);

  std::optional<int> hn, hk;
  std::optional<double> ha, hb;
  auto* hardy = app.add_subcommand("hardy", "weighted Hardy quotients");
  hardy->add_option("--n", hn, "dimension");
  hardy->add_option("--k", hk, "order");
  hardy->add_option("--a", ha, "radial weight");
  hardy->add_option("--b", hb, "y weight");

  std::vector<std::string> groups;
  auto* suite = app.add_subcommand("suite", "all configured groups");
  suite->add_option("--groups", groups, "subset of groups")->delimiter(',');

  CaseOpts ext;
  std::optional<double> ext_alpha;
  double y_min = 1e-4, y_max = 20.0;
  int y_count = 60;
  auto* extend_cmd = app.add_subcommand("extend", "write E_alpha[u] to a field file");
  extend_cmd->add_option("--family", ext.family, "spectral family")->required();
  extend_cmd->add_option("--n", ext.n, "trace dimension")->required();
  extend_cmd->add_option("--s", ext.s, "fractional order")->required();
  extend_cmd->add_option("--alpha", ext_alpha, "kernel order (default s)");
  extend_cmd->add_option("--y-min", y_min, "smallest height")->check(CLI::PositiveNumber);
  extend_cmd->add_option("--y-max", y_max, "largest height")->check(CLI::PositiveNumber);
  extend_cmd->add_option("--y-count", y_count, "heights on the geometric ladder")->check(CLI::Range(2, 100000));

  std::string dump_in;
  auto* dump = app.add_subcommand("dump", "summarise a field file");
  dump->add_option("--in", dump_in, "field file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*dump) return field_summary(dump_in);

    if (*extend_cmd) {
      if (g.out.empty()) throw CLI::ValidationError("extend needs --out");
      const auto order = make_order(*ext.n, *ext.s);
      const SuiteConfig cfg = load_config(g, json::object());
      const auto u = make_test_function(SpectralFamily::parse(ext.family), RhoGrid::make(order.n, cfg.rho_grid()));
      const auto field = extend(u, ext_alpha.value_or(order.s), YLadder::geometric(y_min, y_max, y_count, true),
                                cfg.exec);
      dump_field(field, order.b, g.out);
      std::cerr << "wrote " << field.grid().size() * field.y().size() << " rows to " << g.out << '\n';
      return 0;
    }

    if (*suite) {
      json over = json::object();
      if (!groups.empty()) over["groups"] = groups;
      return emit(run_suite(load_config(g, over)), g);
    }
    if (*constants) return emit(run_groups(load_config(g, json::object()), {"constants"}), g);
    if (*kernel) return emit(run_groups(load_config(g, json::object()), {"kernel"}), g);

    for (auto [sub, opts, section] : {std::tuple{energy, &energy_case, "energy"}, std::tuple{dtn, &dtn_case, "dtn"},
                                      std::tuple{taylor, &taylor_case, "taylor"}}) {
      if (!*sub) continue;
      const SuiteConfig base = load_config(g, json::object());
      json over = json::object();
      if (auto c = single_case(*opts, base, section)) over[section] = {{"cases", json::array({*c})}};
      return emit(run_groups(load_config(g, over), {section}), g);
    }

    if (*hardy) {
      const SuiteConfig base = load_config(g, json::object());
      json over = json::object();
      if (hn || hk || ha || hb) {
        json p = base.doc["hardy"]["params"].empty() ? json{{"n", 2}, {"k", 1}, {"a", 0.0}, {"b", 0.0}}
                                                     : base.doc["hardy"]["params"][0];
        if (hn) p["n"] = *hn;
        if (hk) p["k"] = *hk;
        if (ha) p["a"] = *ha;
        if (hb) p["b"] = *hb;
        over["hardy"] = {{"params", json::array({p})}};
      }
      return emit(run_groups(load_config(g, over), {"hardy"}), g);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
