#include "polyext/orders.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "polyext/specfun.hpp"

namespace polyext {

namespace sf = specfun;

bool HardyParams::admissible() const {
  return n >= 1 && k >= 1 && b > -1.0 && b < 1.0 && a >= 0.0 &&
         a < 0.5 * (n + 1 + b) - k;
}

std::string HardyParams::describe() const {
  std::ostringstream os;
  os << "n=" << n << " k=" << k << " a=" << a << " b=" << b;
  return os.str();
}

FractionalOrder make_order(int n, double s) {
  if (n < 1) throw DomainError("make_order: n must be >= 1");
  if (!(s > 0.0)) throw DomainError("make_order: s must be positive");
  if (!(s < 0.5 * n)) throw DomainError("make_order: s must be < n/2");
  if (s == std::floor(s)) throw DomainError("make_order: s must not be an integer");
  FractionalOrder o;
  o.n = n;
  o.s = s;
  o.int_part = static_cast<int>(std::floor(s));
  o.frac = s - o.int_part;
  o.b = 1.0 - 2.0 * o.frac;
  return o;
}

double d_constant(double s) {
  if (!(s > 0.0) || s == std::floor(s)) throw DomainError("d_constant: s must be positive, non-integer");
  const int m = static_cast<int>(std::floor(s));
  const double sigma = s - m;
  return sf::factorial(m) / sf::gamma(s) * 2.0 * sf::gamma(1.0 - sigma) / std::pow(2.0, 2.0 * sigma);
}

double kappa(double s, int m) {
  if (m < 0) throw DomainError("kappa: m must be >= 0");
  if (m == 0) return 1.0;
  if (!(s > 0.0) || s == std::floor(s)) throw DomainError("kappa: s must be positive, non-integer");
  if (m > static_cast<int>(std::floor(s))) throw DomainError("kappa: m exceeds [s]");
  double sum = 0.0;
  for (int l = 0; l <= m; ++l) {
    const double binom =
        sf::gamma_ratio(m + 1.0, l + 1.0) / sf::gamma(static_cast<double>(m - l) + 1.0);
    const double sign = (l % 2 == 0) ? 1.0 : -1.0;
    sum += binom * sign * sf::gamma_ratio(s - l, s + 0.5 - l);
  }
  return sf::gamma_ratio(s + 0.5, s) * sum;
}

double poisson_normalizer(int n, double alpha) {
  if (n < 1) throw DomainError("poisson_normalizer: n must be >= 1");
  if (!(alpha > 0.0)) throw DomainError("poisson_normalizer: alpha must be positive");
  return sf::gamma_ratio(0.5 * (n + 2.0 * alpha), alpha) / std::pow(std::numbers::pi, 0.5 * n);
}

double hardy_constant(const HardyParams& p) {
  if (!p.admissible()) throw DomainError("hardy_constant: inadmissible parameters " + p.describe());
  const double base = 0.25 * (p.n + 1 + p.b);
  const double half_k = 0.5 * p.k;
  const double parity = half_k - std::floor(half_k);
  const double half_a = 0.5 * p.a;
  return std::pow(2.0, p.k) * sf::gamma_ratio(base + parity - half_a, base + parity + half_a) *
         sf::gamma_ratio(base + half_k + half_a, base - half_k - half_a);
}

namespace {

// 2^{1-alpha}/Gamma(alpha) t^alpha K_nu(t), evaluated in log form.
double scaled_tk(double alpha, double nu, double t) {
  const double log_mag = (1.0 - alpha) * std::log(2.0) - sf::log_gamma(alpha) + alpha * std::log(t) - t +
                         std::log(sf::bessel_k_scaled(nu, t));
  return std::exp(log_mag);
}

}  // namespace

double multiplier(double alpha, double t) {
  if (!(alpha > 0.0)) throw DomainError("multiplier: alpha must be positive");
  if (t < 0.0) throw DomainError("multiplier: t must be nonnegative");
  if (t == 0.0) return 1.0;
  return scaled_tk(alpha, alpha, t);
}

double multiplier_derivative(double alpha, double t) {
  if (!(alpha > 0.0)) throw DomainError("multiplier_derivative: alpha must be positive");
  if (t < 0.0) throw DomainError("multiplier_derivative: t must be nonnegative");
  if (t == 0.0) {
    // t^alpha K_{alpha-1}(t) ~ t^{alpha - |alpha-1|}; vanishes for alpha > 1/2.
    if (alpha > 0.5) return 0.0;
    throw DomainError("multiplier_derivative: unbounded at t = 0 for alpha <= 1/2");
  }
  return -scaled_tk(alpha, alpha - 1.0, t);
}

double dtn_deficit(double alpha, double t, DeficitKind kind) {
  if (t < 0.0) throw DomainError("dtn_deficit: t must be nonnegative");
  switch (kind) {
    case DeficitKind::neumann: {
      if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("dtn_deficit: neumann kind needs alpha in (0,1)");
      if (t == 0.0) return 0.0;
      const double beta = 1.0 - alpha;
      const double log_mag = alpha * std::log(2.0) - sf::log_gamma(beta) + beta * std::log(t) - t +
                             std::log(sf::bessel_k_scaled(beta, t));
      return 1.0 - std::exp(log_mag);
    }
    case DeficitKind::dirichlet:
      return 1.0 - multiplier(alpha, t);
  }
  throw DomainError("dtn_deficit: unknown kind");
}

double sphere_area(int n) {
  if (n < 1) throw DomainError("sphere_area: n must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / sf::gamma(0.5 * n);
}

}  // namespace polyext
