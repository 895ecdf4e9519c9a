#include <cmath>
#include <numbers>

#include "doctest.h"
#include "polyext/extension.hpp"
#include "polyext/orders.hpp"
#include "polyext/specfun.hpp"

using namespace polyext;

namespace {

RadialSpectralFunction gaussian(int n) { return make_test_function(SpectralFamily::parse("gaussian"), RhoGrid::make(n)); }

}  // namespace

TEST_CASE("mode expressions reproduce the half-integer multipliers") {
  const auto m15 = ModeExpr::multiplier(1.5);
  for (double t : {0.0, 1e-3, 0.4, 2.0, 11.0}) {
    CHECK(m15.eval(t) == doctest::Approx((1 + t) * std::exp(-t)).epsilon(1e-13));
    CHECK(m15.derivative().eval(t) == doctest::Approx(-t * std::exp(-t)).epsilon(1e-12));
    CHECK(m15.derivative(2).eval(t) == doctest::Approx((t - 1) * std::exp(-t)).epsilon(1e-12));
  }
  const auto m05 = ModeExpr::multiplier(0.5);
  CHECK(m05.derivative().eval(1.0) == doctest::Approx(-std::exp(-1.0)).epsilon(1e-13));
  CHECK(m05.derivative().eval(0.0) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK_THROWS_AS(ModeExpr::basis(1.0, 0, 0.0).eval(0.0), DomainError);
  CHECK_THROWS_AS(m05.derivative(2).times_t(-1).eval(0.0), DomainError);
}

TEST_CASE("L_b lowers the order of f_mu") {
  for (double mu : {0.3, 1.5, 2.7})
    for (double b : {-0.5, 0.0, 0.4}) {
      const auto e = ModeExpr::basis(1.0, 0, mu).delta_b(b);
      if (std::abs(2 * mu + b - 1) < 1e-12) {
        CHECK(e.is_zero());
        continue;
      }
      REQUIRE(e.terms().size() == 1);
      CHECK(e.terms()[0].mu == doctest::Approx(mu - 1));
      CHECK(e.terms()[0].q == 0);
      CHECK(e.terms()[0].coef == doctest::Approx(-(2 * mu + b - 1)).epsilon(1e-13));
    }
}

TEST_CASE("semigroup in alpha matches the kernel y-derivative identity") {
  // per mode: d_t m_alpha(t) = 2 alpha t^{-1} (m_alpha - m_{alpha+1})
  for (double alpha : {0.3, 0.8, 1.5, 2.6})
    for (double t = 0.02; t < 30.0; t *= 1.8) {
      const double lhs = multiplier_derivative(alpha, t);
      const double rhs = 2 * alpha / t * (multiplier(alpha, t) - multiplier(alpha + 1, t));
      CHECK(std::abs(lhs - rhs) < 1e-10);
    }
}

TEST_CASE("mode profile") {
  ModeProfile p{1.5, 2.0};
  CHECK(p.value(0.0) == 1.0);
  CHECK(p.value(0.5) == doctest::Approx(2 * std::exp(-1.0)));
  CHECK(p.d1(0.5) == doctest::Approx(2.0 * -std::exp(-1.0)));
  CHECK(p.d2(0.0) == doctest::Approx(-4.0));
  double prev = 1.0;
  for (double y = 0.01; y < 5; y *= 1.5) {
    CHECK(p.value(y) < prev);
    prev = p.value(y);
  }
}

TEST_CASE("extend: trace slice and multiplier bound") {
  const auto u = gaussian(2);
  const auto ladder = YLadder::geometric(1e-4, 20.0, 60, true);
  const auto f = extend(u, 0.5, ladder);
  for (std::size_t i = 0; i < u.grid().size(); ++i) {
    CHECK(f.at(i, 0) == u.values()[i]);
    for (std::size_t j = 0; j < f.y().size(); ++j) CHECK(std::abs(f.at(i, j)) <= u.values()[i]);
  }
  // closed form e^{-rho^2/2} e^{-rho y} at y = 1
  const auto g = extend(u, 0.5, std::vector<double>{1.0});
  for (std::size_t i = 0; i < u.grid().size(); i += 37) {
    const double r = u.grid().nodes[i];
    CHECK(g.at(i, 0) == doctest::Approx(std::exp(-0.5 * r * r - r)).epsilon(1e-12));
  }
  const auto par = extend(u, 0.5, ladder, Exec::parallel);
  CHECK(par.values() == f.values());
}

TEST_CASE("axis values: spectral path against the physical quadrature oracle") {
  for (int n : {2, 4}) {
    const auto u = gaussian(n);
    const auto phys = physical_profile(u.family(), n);
    for (double alpha : {0.5, 1.5}) {
      if (alpha >= 0.5 * n) continue;
      for (double y : {0.01, 0.1, 1.0, 5.0}) {
        const double a = axis_value_spectral(u, alpha, y);
        const double b = extend_axis_oracle(phys, n, alpha, y);
        CHECK(std::abs(a - b) <= 1e-6 * std::abs(a));
      }
    }
  }
  const auto u2 = gaussian(2);
  CHECK(extend_axis_oracle(physical_profile(u2.family(), 2), 2, 0.5, 1e-6) == doctest::Approx(1.0).epsilon(1e-5));
  // Taylor model 1 - 2 y^2 for n = 4, s = 1.5
  const auto u4 = gaussian(4);
  const double v = extend_axis_oracle(physical_profile(u4.family(), 4), 4, 1.5, 0.05);
  CHECK(std::abs(v - 0.995) < 1e-3);
  // slater profile
  auto sl = make_test_function(SpectralFamily::parse("slater"), RhoGrid::make(3));
  CHECK(axis_value_spectral(sl, 0.7, 0.3) ==
        doctest::Approx(extend_axis_oracle(physical_profile(sl.family(), 3), 3, 0.7, 0.3)).epsilon(1e-6));
}

TEST_CASE("frac_laplacian multiplier algebra") {
  const auto u = gaussian(2);
  const auto l1 = frac_laplacian(u, 1.0);
  const auto l2 = frac_laplacian(u, 2.0);
  const auto l12 = frac_laplacian(l1, 1.0);
  for (std::size_t i = 0; i < u.grid().size(); i += 13) {
    const double r = u.grid().nodes[i];
    CHECK(l1.values()[i] == doctest::Approx(r * std::exp(-0.5 * r * r)).epsilon(1e-14));
    CHECK(l2.values()[i] == doctest::Approx(r * r * std::exp(-0.5 * r * r)).epsilon(1e-14));
    CHECK(l12.values()[i] == doctest::Approx(l2.values()[i]).epsilon(1e-15));
  }
  CHECK_THROWS_AS(frac_laplacian(u, 0.0), DomainError);
}

TEST_CASE("delta_b_apply analytic path") {
  const auto u = gaussian(4);
  const auto f = extend(u, 1.5, YLadder::geometric(1e-4, 20.0, 60, true));
  const auto d = delta_b_apply(f, 0.0, DerivPath::analytic);
  // -Delta_b E -> 2 rho^2 u_hat at y = 0, and per mode 2 rho^2 u_hat e^{-t} for y > 0
  for (std::size_t i = 0; i < u.grid().size(); i += 29) {
    const double r = u.grid().nodes[i];
    const double uh = u.values()[i];
    CHECK(-d.at(i, 0) == doctest::Approx(2 * r * r * uh).epsilon(1e-12));
    for (std::size_t j = 1; j < d.y.size(); j += 7) {
      const double t = d.y[j] * r;
      CHECK(-d.at(i, j) == doctest::Approx(2 * r * r * uh * std::exp(-t)).epsilon(1e-10));
    }
  }
}

TEST_CASE("delta_b with b = 0 is the plain Laplacian per mode") {
  ModeExpr m = ModeExpr::multiplier(0.8);
  const auto lb = m.delta_b(0.0);
  for (double t : {0.1, 1.0, 3.0})
    CHECK(lb.eval(t) == doctest::Approx(m.derivative(2).eval(t) - m.eval(t)).epsilon(1e-12));
}

TEST_CASE("iterated Delta_b reproduces the lower-order extension") {
  // (-Delta_b)^[s] E_s[u] = (d_s / d_{s-[s]}) E_{s-[s]}[(-Delta)^[s] u] per mode
  for (double s : {1.5, 2.5, 1.3}) {
    const auto o = make_order(6, s);
    const double ratio = d_constant(s) / d_constant(o.frac);
    const auto w = delta_b_tower(s, o.b, o.int_part);
    const double sign = o.int_part % 2 ? -1.0 : 1.0;
    for (double t = 1e-3; t < 40.0; t *= 2.1) {
      const double lhs = sign * w.eval(t);
      const double rhs = ratio * multiplier(o.frac, t);
      CHECK(std::abs(lhs - rhs) <= 1e-8 * std::abs(rhs));
    }
  }
}

TEST_CASE("finite-difference Delta_b converges at second order") {
  const auto u = make_test_function(SpectralFamily::parse("gaussian"), RhoGrid::make(4, {1e-2, 8.0, 2, 6}));
  auto max_err = [&](int per_decade) {
    const int count = 4 * per_decade + 1;  // 1e-3 .. 10
    const auto f = extend(u, 1.5, YLadder::geometric(1e-3, 10.0, count, true));
    const auto fd = delta_b_apply(f, 0.3, DerivPath::finite_difference);
    const auto an = delta_b_apply(f, 0.3, DerivPath::analytic);
    double e = 0.0;
    for (std::size_t i = 0; i < u.grid().size(); ++i)
      for (std::size_t k = 0; k < fd.y.size(); ++k) {
        const double y = fd.y[k];
        if (y < 0.05 || y > 2.0) continue;
        const std::size_t j = static_cast<std::size_t>(std::find(f.y().begin(), f.y().end(), y) - f.y().begin());
        e = std::max(e, std::abs(fd.at(i, k) - an.at(i, j)));
      }
    return e;
  };
  const double e1 = max_err(10);
  const double e2 = max_err(20);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("finite-difference path flags a missing sentinel") {
  const auto u = gaussian(2);
  const auto f = extend(u, 1.5, YLadder::geometric(1e-3, 10.0, 41));
  const auto fd = delta_b_apply(f, 0.0, DerivPath::finite_difference);
  CHECK(fd.y.front() > 1e-3);
  CHECK(fd.warnings.size() == 2);
  const auto sparse = extend(u, 1.5, YLadder::geometric(1e-3, 10.0, 8));
  CHECK_THROWS_AS(delta_b_apply(sparse, 0.0, DerivPath::finite_difference), DomainError);
  CHECK_THROWS_AS(delta_b_apply(f, 0.0, DerivPath::finite_difference, 2), DomainError);
}

TEST_CASE("energy densities") {
  const auto u = gaussian(2);
  const auto f = extend(u, 0.5, std::vector<double>{0.1, 1.0, 3.0});
  const auto d = polyharm_energy_density(f, 1, 0.0);
  for (std::size_t i = 0; i < u.grid().size(); i += 31) {
    const double r = u.grid().nodes[i];
    for (std::size_t j = 0; j < 3; ++j) {
      const double y = f.y()[j];
      // rho^2 |E|^2 + |d_y E|^2 = 2 rho^2 e^{-rho^2} e^{-2 y rho}
      CHECK(d.at(i, j) == doctest::Approx(2 * r * r * std::exp(-r * r - 2 * y * r)).epsilon(1e-11));
    }
  }
  // even k: square of Delta_b applied
  const auto f4 = extend(gaussian(4), 1.5, std::vector<double>{0.2, 0.9});
  const auto d2 = polyharm_energy_density(f4, 2, 0.0);
  const auto lb = delta_b_apply(f4, 0.0, DerivPath::analytic);
  for (std::size_t i = 0; i < f4.grid().size(); i += 17)
    for (std::size_t j = 0; j < 2; ++j) CHECK(d2.at(i, j) == doctest::Approx(lb.at(i, j) * lb.at(i, j)).epsilon(1e-12));
  // zero field
  const auto z = make_test_function(SpectralFamily::parse("zero"), RhoGrid::make(2));
  const auto dz = polyharm_energy_density(extend(z, 0.5, std::vector<double>{0.5}), 1, 0.0);
  for (double v : dz.values) CHECK(v == 0.0);
}

TEST_CASE("y derivatives") {
  const auto u = gaussian(2);
  const auto f = extend(u, 0.5, std::vector<double>{0.0, 0.7});
  const auto d1 = y_derivative(f, 1, DerivPath::analytic);
  for (std::size_t i = 0; i < u.grid().size(); i += 23) {
    const double r = u.grid().nodes[i];
    CHECK(d1.at(i, 0) == 0.0);
    CHECK(d1.at(i, 1) == doctest::Approx(-r * u.values()[i] * std::exp(-0.7 * r)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(y_derivative(f, 2, DerivPath::analytic), DomainError);
  const auto g = extend(gaussian(4), 1.5, std::vector<double>{0.0, 0.3});
  const auto d2 = y_derivative(g, 2, DerivPath::analytic);
  for (std::size_t i = 0; i < g.grid().size(); i += 23) {
    const double r = g.grid().nodes[i];
    CHECK(d2.at(i, 0) == doctest::Approx(-r * r * g.trace()[i]).epsilon(1e-12));
  }
}

TEST_CASE("finite-difference y derivative tracks the analytic one") {
  const auto u = make_test_function(SpectralFamily::parse("gaussian"), RhoGrid::make(2, {1e-2, 8.0, 2, 6}));
  const auto f = extend(u, 1.5, YLadder::geometric(1e-3, 10.0, 161, true));
  const auto fd = y_derivative(f, 1, DerivPath::finite_difference);
  const auto an = y_derivative(f, 1, DerivPath::analytic);
  for (std::size_t i = 0; i < u.grid().size(); i += 5)
    for (std::size_t k = 1; k < fd.y.size(); k += 10) CHECK(std::abs(fd.at(i, k) - an.at(i, k)) < 2e-3);
}
