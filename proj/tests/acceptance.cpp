// Acceptance run: one line per criterion, exit status 1 when any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "polyext/extension.hpp"
#include "polyext/functionals.hpp"
#include "polyext/kernel.hpp"
#include "polyext/orders.hpp"
#include "polyext/radial_field.hpp"
#include "polyext/specfun.hpp"

using namespace polyext;
namespace fs = std::filesystem;

namespace {

const double pi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

RadialSpectralFunction fam(const char* name, int n) {
  return make_test_function(SpectralFamily::parse(name), RhoGrid::make(n));
}

Outcome c1_constants() {
  Outcome o;
  double worst = 0.0;
  for (auto [s, d] : std::vector<std::pair<double, double>>{{0.5, 1.0}, {1.5, 2.0}, {2.5, 8.0 / 3.0}})
    worst = std::max(worst, std::abs(d_constant(s) - d));
  o.require(worst <= 1e-12, "d_s");
  o.require(kappa(0.5, 0) == 1.0 && kappa(1.5, 0) == 1.0 && kappa(2.5, 0) == 1.0, "kappa_{s,0} exact");
  const double k = std::max(std::abs(kappa(1.5, 1) + 1.0), std::abs(kappa(2.5, 1) + 1.0 / 3.0));
  o.require(k <= 1e-12, "kappa_{s,1}");
  o.note("max|d err| " + g(worst) + ", max|kappa err| " + g(k));
  return o;
}

Outcome c2_kernel_ft() {
  Outcome o;
  const std::vector<double> rho{0.0, 0.05, 0.3, 1.0, 2.5, 6.0};
  double ft = 0.0;
  for (auto [n, a] : std::vector<std::pair<int, double>>{{1, 0.3}, {1, 0.5}, {2, 0.75}, {2, 1.5}}) {
    const auto c = kernel_ft_check(n, a, rho, 1.0);
    for (std::size_t i = 0; i < rho.size(); ++i)
      ft = std::max(ft, std::abs(c.transform[i] - multiplier(a, rho[i])) / multiplier(a, rho[i]));
  }
  o.require(ft < 1e-6, "transform residual");
  double closed = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double t = 1e-2 * std::pow(3000.0, i / 400.0);
    closed = std::max(closed, std::abs(multiplier(0.5, t) - std::exp(-t)) / std::exp(-t));
    closed = std::max(closed, std::abs(multiplier(1.5, t) - (1 + t) * std::exp(-t)) / ((1 + t) * std::exp(-t)));
  }
  o.require(closed <= 1e-10, "closed forms");
  o.note("max rel FT residual " + g(ft) + ", closed forms " + g(closed));
  return o;
}

Outcome c3_identities() {
  Outcome o;
  double worst = 0.0;
  const double pts[3][2] = {{0.7, 0.4}, {0.7, 1.0}, {1.5, 2.0}};
  for (double a : {0.4, 1.3, 2.6})
    for (double b : {-0.6, 0.0, 0.5})
      for (const auto& p : pts) {
        worst = std::max(worst, r1_residual(KernelIdentity::i_dy, 3, a, b, 0, p[0], p[1]));
        worst = std::max(worst, r1_residual(KernelIdentity::i_delta_b, 3, a, b, 0, p[0], p[1]));
        if (a > 1.0) {
          worst = std::max(worst, r1_residual(KernelIdentity::ii, 3, a, b, 0, p[0], p[1]));
          worst = std::max(worst, r1_relative_residual(KernelIdentity::iii, 3, a, b, 1, p[0], p[1]));
        }
      }
  o.require(worst <= 1e-10, "identity residual");
  double mass = 0.0;
  for (auto [n, a] : std::vector<std::pair<int, double>>{{1, 0.3}, {2, 0.75}, {3, 1.5}})
    mass = std::max(mass, std::abs(kernel_mass(n, a) - 1.0));
  o.require(mass <= 1e-8, "kernel mass");
  o.note("max identity residual " + g(worst) + ", max|mass-1| " + g(mass));
  return o;
}

Outcome c4_energy() {
  Outcome o;
  const double e2 = energy_identity(fam("gaussian", 2), make_order(2, 0.5)).energy;
  const double e4 = energy_identity(fam("gaussian", 4), make_order(4, 1.5)).energy;
  const double r2 = std::abs(e2 / std::pow(pi, 1.5) - 1.0), r4 = std::abs(e4 / (7.5 * std::pow(pi, 2.5)) - 1.0);
  o.require(r2 <= 1e-2, "gaussian n=2 energy");
  o.require(r4 <= 1e-2, "gaussian n=4 energy");
  double cs = 0.0;
  for (auto [n, s] : std::vector<std::pair<int, double>>{{2, 0.3}, {2, 0.75}, {4, 1.5}, {6, 2.5}})
    cs = std::max(cs, std::abs(walphasumm_constant(s, s, n) / (2.0 * d_constant(s)) - 1.0));
  o.require(cs <= 1e-6, "C_s = 2 d_s");
  o.note("energies " + g(e2) + " (rel " + g(r2) + "), " + g(e4) + " (rel " + g(r4) + "), max rel C_s err " + g(cs));
  return o;
}

Outcome c5_dtn() {
  Outcome o;
  for (auto [n, s] : std::vector<std::pair<int, double>>{{2, 0.5}, {4, 1.5}}) {
    const auto u = fam("gaussian", n);
    const auto ord = make_order(n, s);
    std::vector<double> v;
    for (int j = 3; j <= 10; ++j) v.push_back(dtn_residual_norm(u, ord, std::ldexp(1.0, -j)));
    bool decreasing = true;
    for (std::size_t i = 1; i < v.size(); ++i) decreasing = decreasing && v[i] < v[i - 1];
    const std::string tag = "n=" + std::to_string(n);
    o.require(decreasing, tag + " strictly decreasing");
    o.require(v.back() < 1e-2 * v.front(), tag + " final < 1e-2 first");
    o.note(tag + " final/first " + g(v.back() / v.front()));
  }
  return o;
}

Outcome c6_taylor() {
  Outcome o;
  const auto u = fam("gaussian", 4);
  const auto ord = make_order(4, 1.5);
  const double y = 0.05;
  // E(0,y) - (1 - 2y^2) taken directly from the axis value
  const double r = axis_value_spectral(u, 1.5, y) - (1.0 - 2.0 * y * y);
  o.require(std::abs(r - taylor_remainder(u, ord, y)) <= 1e-12, "remainder bookkeeping");
  const double scaled = std::abs(r) / (y * y);
  o.require(scaled <= 0.1, "|R(0.05)|/y^2 <= 0.1");
  double worst = 0.0;
  for (double h : {0.1, 0.05, 0.025, 0.0125})
    worst = std::max(worst, std::abs(taylor_remainder(u, ord, 0.5 * h) / taylor_remainder(u, ord, h)));
  o.require(worst <= 0.3, "halving ratio <= 0.3");
  double kfd = 0.0;
  for (auto [s, m] : std::vector<std::pair<double, int>>{{1.5, 1}, {2.5, 1}, {2.5, 2}})
    kfd = std::max(kfd, std::abs(kappa_fd(s, m) / kappa(s, m) - 1.0));
  o.require(kfd <= 1e-6, "kappa multiplier-series cross-check");
  o.note("|R(0.05)|/y^2 = " + g(scaled) + ", max halving ratio " + g(worst) + ", kappa fd rel err " + g(kfd));
  return o;
}

Outcome c7_limits() {
  Outcome o;
  for (auto [n, s, m] : std::vector<std::tuple<int, double, int>>{{4, 1.5, 1}, {6, 2.5, 1}, {6, 2.5, 2}}) {
    const double gap = limits_gap(fam("gaussian", n), make_order(n, s), m, 1e-3);
    o.require(gap < 1e-2, "limits s=" + g(s) + " m=" + std::to_string(m));
    o.note("gap(s=" + g(s) + ",m=" + std::to_string(m) + ") " + g(gap));
  }
  double r15 = 0.0, r25 = 0.0;
  for (double y : {0.05, 0.3, 2.0}) {
    r15 = std::max(r15, recursion_residual(fam("gaussian", 4), make_order(4, 1.5), 1, y));
    for (int m : {1, 2}) r25 = std::max(r25, recursion_residual(fam("gaussian", 6), make_order(6, 2.5), m, y));
  }
  // s = 1.5 closed form: both sides reduce to 2 e^{-t} per mode
  const auto lhs = delta_b_tower(1.5, 0.0, 1);
  for (int i = 0; i <= 200; ++i) {
    const double t = 1e-3 * std::pow(3e4, i / 200.0);
    r15 = std::max(r15, std::abs(-lhs.eval(t) - 2.0 * std::exp(-t)) / (2.0 * std::exp(-t)));
  }
  o.require(r15 <= 1e-12, "recursion s=1.5");
  o.require(r25 <= 1e-8, "recursion s=2.5");
  o.note("recursion " + g(r15) + ", " + g(r25));
  return o;
}

Outcome c8_hardy() {
  Outcome o;
  PolyExp bump = PolyExp::gaussian(0.5, 0.5);
  bump.add(1, 0, 1.0);
  const std::vector<PolyExp> fields{PolyExp::gaussian(0.5, 0.5), PolyExp::gaussian(0.5, 1.0), bump};
  double margin = 1e300;
  for (auto [k, a, b] : std::vector<std::tuple<int, double, double>>{{1, 0.0, 0.0}, {1, 0.5, -0.4}, {2, 0.0, 0.0},
                                                                     {2, 0.0, 0.5}}) {
    int n = 1;
    while (!HardyParams{n, k, a, b}.admissible()) ++n;
    for (const auto& f : fields) {
      const auto q = hardy_quotient(PhysicalField::from_family(n, f, {0.0}, {0.0}), {n, k, a, b});
      margin = std::min(margin, q.quotient / q.bound);
    }
  }
  o.require(margin >= 0.98, "quotient >= 0.98 H^2");
  const auto gq = hardy_quotient(PhysicalField::from_family(2, PolyExp::gaussian(0.5, 0.5), {0.0}, {0.0}), {2, 1, 0, 0});
  o.require(std::abs(gq.quotient / 0.75 - 1.0) <= 1e-2, "gaussian d=3 value");
  o.note("min quotient/H^2 " + g(margin) + ", gaussian d=3 " + g(gq.quotient) + " vs bound " + g(gq.bound));
  return o;
}

Outcome c9_trace() {
  Outcome o;
  const auto u = fam("gaussian", 4);
  const double u0 = eval_physical_origin(u);
  double lo = 1e300, hi = 0.0;
  for (double y : {0.1, 0.05, 0.025, 0.0125}) {
    const double r = std::abs(axis_value_spectral(u, 1.5, y) - u0) / std::abs(axis_value_spectral(u, 1.5, 0.5 * y) - u0);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  o.require(lo >= 3.4 && hi <= 4.6, "halving ratio in [3.4, 4.6]");
  const auto field = extend(u, 1.5, YLadder::geometric(1e-3, 1.0, 5, true));
  bool exact = field.y().front() == 0.0;
  for (std::size_t i = 0; i < field.grid().size(); ++i) exact = exact && field.at(i, 0) == u.values()[i];
  o.require(exact, "spectral trace slice exact");
  o.note("halving ratios in [" + g(lo) + ", " + g(hi) + "]");
  return o;
}

Outcome c10_ibp() {
  Outcome o;
  auto V = PolyExp::gaussian(1.0, 0.7);
  V.add(0, 1, 0.3);
  double s1 = 0.0;
  for (auto [n, k, b] : std::vector<std::tuple<int, int, double>>{{3, 2, 0.5}, {3, 3, 0.5}, {4, 4, -0.3}})
    s1 = std::max(s1, ibp_step1(PolyExp::gaussian(0.5, 0.5), V, n, k, b));
  o.require(s1 <= 1e-6, "step1");
  const auto trace_free = PolyExp::monomial(1.0, 0, 1, 1.0, 1.0);
  const double orth = std::max(ibp_orthogonality(fam("gaussian", 4), make_order(4, 1.5), trace_free),
                               ibp_orthogonality(fam("gaussian", 3), make_order(3, 0.6), trace_free));
  o.require(orth <= 1e-3, "orthogonality");
  const auto u = fam("gaussian", 4);
  const auto ord = make_order(4, 1.5);
  const double f2 = normal_flux(u, ord, 1, 1e-2), f3 = normal_flux(u, ord, 1, 1e-3), f4 = normal_flux(u, ord, 1, 1e-4);
  o.require(f3 < f2 && f4 < f3 && f4 <= 1e-2, "normal flux decreasing to <= 1e-2");
  o.note("step1 " + g(s1) + ", orthogonality " + g(orth) + ", flux " + g(f2) + " > " + g(f3) + " > " + g(f4));
  return o;
}

Outcome c11_boundedness() {
  Outcome o;
  for (auto [name, n, s] : std::vector<std::tuple<const char*, int, double>>{
           {"gaussian", 2, 0.5}, {"gaussian", 4, 1.5}, {"poly_gaussian(1)", 4, 1.5}}) {
    const auto rs = boundedness_ratios(SpectralFamily::parse(name), make_order(n, s));
    double lo = 1e300, hi = 0.0;
    for (const auto& r : rs) {
      lo = std::min(lo, r.ratio);
      hi = std::max(hi, r.ratio);
    }
    o.require(std::isfinite(hi) && lo > 0.0 && hi / lo <= 10.0, std::string(name) + " spread");
    o.note(std::string(name) + " n=" + std::to_string(n) + " spread " + g(hi / lo));
  }
  return o;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(POLYEXT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

nlohmann::json read_report(const fs::path& p) {
  std::ifstream in(p);
  auto j = nlohmann::json::parse(in);
  j.erase("timing");
  return j;
}

Outcome c12_cli() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / ("polyext_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const int a = cli("suite --format json --out " + (dir / "a.json").string());
  const int b = cli("suite --format json --out " + (dir / "b.json").string());
  o.require(a == 0 && b == 0, "suite exit 0");
  std::size_t total = 0;
  try {
    const auto ja = read_report(dir / "a.json"), jb = read_report(dir / "b.json");
    o.require(ja.dump() == jb.dump(), "byte-identical reports");
    total = ja["summary"]["total"].get<std::size_t>();
  } catch (const std::exception& e) {
    o.require(false, std::string("report parse: ") + e.what());
  }
  o.require(total >= 40, "at least 40 checks");
  o.require(cli("--tol-scale 1e-30 constants") == 1, "exit 1 on failed check");
  std::ofstream(dir / "bad.json") << R"({"energy": {"cases": [{"family": "gaussian", "n": 2, "s": 1.2}]}})";
  o.require(cli("suite --config " + (dir / "bad.json").string()) == 2, "exit 2 on bad config");
  o.require(cli("suite --no-such-flag") == 2, "exit 2 on unknown flag");
  fs::remove_all(dir);
  o.note(std::to_string(total) + " checks, exit codes 0/1/2 as specified");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"constants table", c1_constants},
      {"kernel Fourier transform", c2_kernel_ft},
      {"kernel identities and mass", c3_identities},
      {"energy identity", c4_energy},
      {"Neumann limit", c5_dtn},
      {"axis Taylor expansion", c6_taylor},
      {"limit identities and recursion", c7_limits},
      {"weighted Hardy inequalities", c8_hardy},
      {"trace recovery", c9_trace},
      {"integration by parts and flux", c10_ibp},
      {"boundedness", c11_boundedness},
      {"determinism and CLI", c12_cli},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("criterion %2zu  %-4s  %-32s %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed ? 1 : 0;
}
