#include "polyext/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "polyext/orders.hpp"
#include "polyext/quadrature.hpp"
#include "polyext/specfun.hpp"

namespace polyext {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

double poisson_eval(const KernelPoint& p) {
  if (p.y == 0.0) throw DomainError("poisson_eval: y = 0 lies on the trace hyperplane");
  if (p.r < 0.0) throw DomainError("poisson_eval: r must be >= 0");
  const double y = std::abs(p.y);
  const double log_v = 2.0 * p.alpha * std::log(y) - 0.5 * (p.n + 2.0 * p.alpha) * std::log(p.r * p.r + y * y);
  return poisson_normalizer(p.n, p.alpha) * std::exp(log_v);
}

double kernel_mass(int n, double alpha, double y) {
  if (!(alpha > 0.0)) throw DomainError("kernel_mass: alpha must be positive");
  if (y == 0.0) throw DomainError("kernel_mass: y = 0");
  // r = y cot(phi): the integrand behaves like phi^{2 alpha - 1} at phi = 0.
  const double beta = 2.0 * alpha - 1.0;
  const double half_pi = 0.5 * kPi;
  const auto rule = quad::power_endpoint_graded(beta, half_pi, 1e-8, 0.5, half_pi / 16, 4, 20);
  double total = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double phi = rule.nodes[k];
    const double s = std::sin(phi);
    const double r = std::abs(y) * std::cos(phi) / s;
    const double jac = std::abs(y) / (s * s);
    const double g = poisson_eval({n, alpha, r, y}) * std::pow(r, n - 1) * jac;
    total += rule.weights[k] * g / std::pow(phi, beta);
  }
  return sphere_area(n) * total;
}

namespace {

double bessel_j0_zero(int k) {
  const double beta = (k - 0.25) * kPi;
  const double b8 = 8.0 * beta;
  double z = beta + 1.0 / b8 - 124.0 / (3.0 * b8 * b8 * b8);
  for (int it = 0; it < 8; ++it) {
    const double step = std::cyl_bessel_j(0.0, z) / -std::cyl_bessel_j(1.0, z);
    z -= step;
    if (std::abs(step) < 1e-15 * z) break;
  }
  return z;
}

// k-th positive zero (k >= 1) of the oscillating factor at unit frequency.
double oscillator_zero(int n, int k) { return n == 1 ? (k - 0.5) * kPi : bessel_j0_zero(k); }

// (2 pi)^{n/2} times the radial Fourier transform at rho, i.e. the quantity compared to m_alpha(y rho).
double transform_at(int n, double alpha, double rho, double y, double* err) {
  auto integrand = [&](double r) {
    const double p = poisson_eval({n, alpha, r, y});
    return n == 1 ? 2.0 * p * std::cos(rho * r) : 2.0 * kPi * p * r * std::cyl_bessel_j(0.0, rho * r);
  };
  const int order = 24;
  if (rho == 0.0) {
    if (err) *err = 0.0;
    return kernel_mass(n, alpha, y);
  }
  // Near segment: kernel peak (scale y) plus the first oscillations.
  int k0 = 1;
  while (oscillator_zero(n, k0) / rho < 8.0 * y) ++k0;
  const double near_end = oscillator_zero(n, k0) / rho;
  std::vector<double> edges = {0.0};
  for (double f = 0.125; f * y < near_end; f *= 2.0) edges.push_back(f * y);
  for (int k = 1; k <= k0; ++k) edges.push_back(oscillator_zero(n, k) / rho);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  // keep every panel within a quarter of the peak scale or a geometric ratio 2
  std::vector<double> fine = {edges.front()};
  for (std::size_t i = 1; i < edges.size(); ++i) {
    const double a = fine.back();
    const double b = edges[i];
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / std::max(0.5 * y, a))));
    for (int p = 1; p <= pieces; ++p) fine.push_back(a + (b - a) * p / pieces);
  }
  double partial = quad::composite(fine, order).apply(integrand);
  std::vector<double> sums;
  const int tail_intervals = 32;
  for (int k = k0; k < k0 + tail_intervals; ++k) {
    partial += quad::gauss_legendre(order, oscillator_zero(n, k) / rho, oscillator_zero(n, k + 1) / rho).apply(integrand);
    sums.push_back(partial);
  }
  return quad::wynn_epsilon(sums, err);
}

}  // namespace

FtCheck kernel_ft_check(int n, double alpha, const std::vector<double>& rho, double y) {
  if (n != 1 && n != 2) throw DomainError("kernel_ft_check: direct transform implemented for n in {1, 2}");
  if (!(alpha > 0.0)) throw DomainError("kernel_ft_check: alpha must be positive");
  if (!(y > 0.0)) throw DomainError("kernel_ft_check: y must be positive");
  FtCheck out;
  for (double r : rho) {
    if (r < 0.0) throw DomainError("kernel_ft_check: negative frequency");
    double err = 0.0;
    const double v = transform_at(n, alpha, r, y, &err);
    out.transform.push_back(v);
    out.max_residual = std::max(out.max_residual, std::abs(v - multiplier(alpha, y * r)));
    out.max_error_estimate = std::max(out.max_error_estimate, err);
  }
  if (out.max_error_estimate > 1e-7)
    throw DomainError("kernel_ft_check: oscillatory quadrature did not converge (error estimate " +
                      std::to_string(out.max_error_estimate) + ")");
  return out;
}

// ---- symbolic kernel expressions -----------------------------------------

KernelExpr KernelExpr::poisson(int n, double alpha) {
  KernelExpr e;
  e.add(poisson_normalizer(n, alpha), 2.0 * alpha, 0, 0.5 * (n + 2.0 * alpha));
  return e;
}

void KernelExpr::add(double coef, double a, int i, double e) {
  if (coef == 0.0) return;
  for (auto& t : terms_) {
    if (t.i == i && std::abs(t.a - a) < 1e-12 && std::abs(t.e - e) < 1e-12) {
      t.coef += coef;
      return;
    }
  }
  terms_.push_back({coef, a, i, e});
}

KernelExpr& KernelExpr::operator+=(const KernelExpr& o) {
  for (const auto& t : o.terms_) add(t.coef, t.a, t.i, t.e);
  return *this;
}

KernelExpr KernelExpr::operator-(const KernelExpr& o) const {
  KernelExpr r = *this;
  r += o.scaled(-1.0);
  return r;
}

KernelExpr KernelExpr::scaled(double c) const {
  KernelExpr r;
  for (const auto& t : terms_) r.add(c * t.coef, t.a, t.i, t.e);
  return r;
}

KernelExpr KernelExpr::times_y_power(double k) const {
  KernelExpr r;
  for (const auto& t : terms_) r.add(t.coef, t.a + k, t.i, t.e);
  return r;
}

KernelExpr KernelExpr::dy() const {
  KernelExpr r;
  for (const auto& t : terms_) {
    r.add(t.coef * t.a, t.a - 1.0, t.i, t.e);
    r.add(-2.0 * t.e * t.coef, t.a + 1.0, t.i, t.e + 1.0);
  }
  return r;
}

KernelExpr KernelExpr::inv_y_dy() const { return dy().times_y_power(-1.0); }

KernelExpr KernelExpr::laplace_x(int n) const {
  // radial Laplacian in p = r^2:  4 p d_pp + 2n d_p, with d_p S = 1
  auto d_p = [](const KernelExpr& f) {
    KernelExpr r;
    for (const auto& t : f.terms_) {
      if (t.i > 0) r.add(t.coef * t.i, t.a, t.i - 1, t.e);
      r.add(-t.e * t.coef, t.a, t.i, t.e + 1.0);
    }
    return r;
  };
  const KernelExpr fp = d_p(*this);
  const KernelExpr fpp = d_p(fp);
  KernelExpr r;
  for (const auto& t : fpp.terms_) r.add(4.0 * t.coef, t.a, t.i + 1, t.e);
  r += fp.scaled(2.0 * n);
  return r;
}

KernelExpr KernelExpr::delta_b(int n, double b) const {
  KernelExpr r = laplace_x(n);
  r += dy().dy();
  r += inv_y_dy().scaled(b);
  return r;
}

double KernelExpr::eval(double r, double y) const {
  if (!(y > 0.0)) throw DomainError("KernelExpr::eval: y must be positive");
  const double p = r * r;
  const double log_y = std::log(y);
  const double log_s = std::log(p + y * y);
  double s = 0.0;
  for (const auto& t : terms_) s += t.coef * std::pow(p, t.i) * std::exp(t.a * log_y - t.e * log_s);
  return s;
}

double KernelExpr::magnitude(double r, double y) const {
  const double p = r * r;
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.coef) * std::pow(p, t.i) * std::exp(t.a * std::log(y) - t.e * std::log(p + y * y));
  return s;
}

KernelIdentity parse_kernel_identity(const std::string& name) {
  if (name == "i_dy") return KernelIdentity::i_dy;
  if (name == "i_delta_b") return KernelIdentity::i_delta_b;
  if (name == "ii") return KernelIdentity::ii;
  if (name == "iii") return KernelIdentity::iii;
  throw DomainError("unknown kernel identity: " + name);
}

std::string kernel_identity_name(KernelIdentity which) {
  switch (which) {
    case KernelIdentity::i_dy: return "i_dy";
    case KernelIdentity::i_delta_b: return "i_delta_b";
    case KernelIdentity::ii: return "ii";
    case KernelIdentity::iii: return "iii";
  }
  return "?";
}

namespace {

std::pair<KernelExpr, KernelExpr> identity_sides(KernelIdentity which, int n, double alpha, double b, int m) {
  if (!(alpha > 0.0)) throw DomainError("r1_residual: alpha must be positive");
  if (!(b > -1.0 && b < 1.0)) throw DomainError("r1_residual: need -1 < b < 1");
  const KernelExpr pa = KernelExpr::poisson(n, alpha);
  switch (which) {
    case KernelIdentity::i_dy: {
      const KernelExpr rhs = (pa - KernelExpr::poisson(n, alpha + 1.0)).times_y_power(-1.0).scaled(2.0 * alpha);
      return {pa.dy(), rhs};
    }
    case KernelIdentity::i_delta_b: {
      const KernelExpr rhs =
          (pa - KernelExpr::poisson(n, alpha + 1.0)).times_y_power(-2.0).scaled(2.0 * alpha * (b - 1.0 + 2.0 * alpha));
      return {pa.delta_b(n, b), rhs};
    }
    case KernelIdentity::ii: {
      if (!(alpha > 1.0)) throw DomainError("r1_residual(ii): requires alpha > 1");
      const KernelExpr rhs = KernelExpr::poisson(n, alpha - 1.0).laplace_x(n).times_y_power(1.0).scaled(0.5 / (alpha - 1.0));
      return {pa.dy(), rhs};
    }
    case KernelIdentity::iii: {
      if (m < 1) throw DomainError("r1_residual(iii): m must be a positive integer");
      if (!(m < alpha)) throw DomainError("r1_residual(iii): requires m < alpha");
      KernelExpr lhs = pa;
      for (int t = 0; t < m; ++t) lhs = lhs.delta_b(n, b);
      KernelExpr rhs = KernelExpr::poisson(n, alpha - m);
      for (int t = 0; t < m; ++t) rhs = rhs.laplace_x(n);
      const double h = 0.5 * (b + 1.0);
      const double g = specfun::gamma_ratio(h + alpha, h + alpha - m) * specfun::gamma_ratio(alpha - m, alpha);
      return {lhs, rhs.scaled(g)};
    }
  }
  throw DomainError("r1_residual: unknown identity");
}

}  // namespace

double r1_residual(KernelIdentity which, int n, double alpha, double b, int m, double r, double y) {
  if (y == 0.0) throw DomainError("r1_residual: point lies on y = 0");
  const auto [lhs, rhs] = identity_sides(which, n, alpha, b, m);
  const double ya = std::abs(y);
  return std::abs(lhs.eval(r, ya) - rhs.eval(r, ya));
}

double r1_relative_residual(KernelIdentity which, int n, double alpha, double b, int m, double r, double y) {
  if (y == 0.0) throw DomainError("r1_residual: point lies on y = 0");
  const auto [lhs, rhs] = identity_sides(which, n, alpha, b, m);
  const double ya = std::abs(y);
  return std::abs(lhs.eval(r, ya) - rhs.eval(r, ya)) / std::max(lhs.magnitude(r, ya), 1e-300);
}

}  // namespace polyext
