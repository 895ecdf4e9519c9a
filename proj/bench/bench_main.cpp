// Serial reference vs OpenMP kernels: wall time and result agreement per workload.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "polyext/extension.hpp"
#include "polyext/functionals.hpp"
#include "polyext/parallel.hpp"

using namespace polyext;

namespace {

struct Workload {
  std::string name;
  std::function<std::vector<double>(Exec)> run;
};

double best_of(int reps, const std::function<void()>& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polyext_bench: serial vs parallel kernels"};
  int reps = 3;
  double scale = 1.0;
  app.add_option("--reps", reps, "repetitions, best time kept")->check(CLI::Range(1, 1000));
  app.add_option("--scale", scale, "grid refinement factor")->check(CLI::Range(0.25, 16.0));
  CLI11_PARSE(app, argc, argv);

  const int ppd = std::max(2, static_cast<int>(std::lround(8 * scale)));
  const auto grid = RhoGrid::make(4, {1e-4, 40.0, ppd, 12});
  const auto u = make_test_function(SpectralFamily::parse("gaussian"), grid);
  const auto order = make_order(4, 1.5);
  const YQuadSpec yq{2000.0, 1e-6, ppd, 12};
  const auto ladder = YLadder::geometric(1e-4, 20.0, static_cast<int>(std::lround(200 * scale)));

  std::vector<Workload> work{
      {"extend", [&](Exec e) { return extend(u, 1.5, ladder, e).values(); }},
      {"delta_b_apply", [&](Exec e) {
         return delta_b_apply(extend(u, 1.5, ladder, Exec::serial), 0.0, DerivPath::analytic, 2, e).values;
       }},
      {"energy_identity", [&](Exec e) { return std::vector<double>{energy_identity(u, order, yq, e).energy}; }},
      {"hardy_quotient", [&](Exec e) {
         const auto U = PhysicalField::from_family(4, PolyExp::gaussian(0.5, 0.5), {0.0}, {0.0});
         return std::vector<double>{hardy_quotient(U, {4, 2, 0.0, 0.0}, {}, e).quotient};
       }},
      {"boundedness", [&](Exec e) {
         std::vector<double> out;
         for (const auto& r : boundedness_ratios(SpectralFamily::parse("gaussian"), order, {}, e)) out.push_back(r.ratio);
         return out;
       }},
  };

  std::printf("threads %d, reps %d, rho nodes %zu\n", max_threads(), reps, grid->size());
  std::printf("%-16s %12s %12s %8s %10s\n", "workload", "serial s", "parallel s", "speedup", "max diff");
  for (const auto& w : work) {
    std::vector<double> rs, rp;
    const double ts = best_of(reps, [&] { rs = w.run(Exec::serial); });
    const double tp = best_of(reps, [&] { rp = w.run(Exec::parallel); });
    std::printf("%-16s %12.4f %12.4f %8.2f %10.3g\n", w.name.c_str(), ts, tp, ts / tp, max_diff(rs, rp));
  }
  return 0;
}
