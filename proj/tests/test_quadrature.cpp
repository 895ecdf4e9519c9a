#include <cmath>
#include <numbers>

#include "doctest.h"
#include "polyext/parallel.hpp"
#include "polyext/quadrature.hpp"
#include "polyext/specfun.hpp"

using namespace polyext;

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  const auto r = quad::gauss_legendre(8, -1.0, 3.0);
  // exact for degree <= 15
  const double v = r.apply([](double x) { return std::pow(x, 15) - 2 * x * x; });
  const double exact = (std::pow(3.0, 16) - 1.0) / 16 - 2.0 * (27.0 + 1.0) / 3;
  CHECK(v == doctest::Approx(exact).epsilon(1e-13));
  double wsum = 0;
  for (double w : r.weights) wsum += w;
  CHECK(wsum == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("geometric edges") {
  const auto e = quad::geometric_edges(1e-4, 1.0, 4);
  REQUIRE(e.size() == 5);
  CHECK(e.front() == 1e-4);
  CHECK(e.back() == 1.0);
  CHECK(e[2] == doctest::Approx(1e-2));
  CHECK_THROWS_AS(quad::geometric_edges(0.0, 1.0, 3), DomainError);
}

TEST_CASE("power_endpoint weight integrals") {
  for (double b : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
    const auto r = quad::power_endpoint(b, 1.0, 1e-4, 4, 10);
    CHECK(r.apply([](double) { return 1.0; }) == doctest::Approx(1.0 / (1 + b)).epsilon(1e-12));
    // smooth factor
    const double v = r.apply([](double y) { return std::exp(-y); });
    // int_0^1 y^b e^{-y} = lower incomplete gamma, check against a fine rule
    const auto fine = quad::power_endpoint(b, 1.0, 1e-6, 12, 20);
    CHECK(v == doctest::Approx(fine.apply([](double y) { return std::exp(-y); })).epsilon(1e-12));
  }
  CHECK(quad::power_endpoint(-0.5, 1.0, 1e-3, 3, 10).apply([](double) { return 1.0; }) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(quad::power_endpoint(-1.0, 1.0, 1e-3, 3, 10), DomainError);
}

TEST_CASE("power_endpoint_graded over a long interval") {
  const auto r = quad::power_endpoint_graded(0.0, 40.0, 1e-4, 4.0, 0.5, 4, 12);
  CHECK(r.apply([](double x) { return std::exp(-x * x); }) == doctest::Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-13));
  for (int p = 0; p <= 12; ++p) {
    const double v = r.apply([p](double x) { return std::pow(x, p) * std::exp(-x * x); });
    CHECK(v == doctest::Approx(std::tgamma((p + 1) / 2.0) / 2).epsilon(1e-11));
  }
}

TEST_CASE("wynn_epsilon accelerates an alternating series") {
  // partial sums of log 2 = 1 - 1/2 + 1/3 - ...
  std::vector<double> s;
  double acc = 0;
  for (int k = 1; k <= 14; ++k) {
    acc += ((k % 2) ? 1.0 : -1.0) / k;
    s.push_back(acc);
  }
  double err = 0;
  const double v = quad::wynn_epsilon(s, &err);
  CHECK(std::abs(v - std::log(2.0)) < 1e-10);
  CHECK(err < 1e-8);
  CHECK(std::abs(s.back() - std::log(2.0)) > 1e-2);
}

TEST_CASE("serial and parallel row sums are bitwise equal") {
  auto row = [](std::size_t i) { return std::sin(0.1 * static_cast<double>(i)) / (1.0 + static_cast<double>(i)); };
  const double a = sum_rows(Exec::serial, 1001, row);
  const double b = sum_rows(Exec::parallel, 1001, row);
  CHECK(a == b);
  CHECK(pairwise_sum({}) == 0.0);
  CHECK(pairwise_sum({1.0, 2.0, 3.0}) == 6.0);
}

TEST_CASE("parallel rows propagate exceptions") {
  auto row = [](std::size_t i) -> double {
    if (i == 7) throw DomainError("row 7");
    return 1.0;
  };
  CHECK_THROWS_AS(map_rows(Exec::parallel, 20, row), DomainError);
  CHECK_THROWS_AS(map_rows(Exec::serial, 20, row), DomainError);
}
