#include "polyext/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "polyext/quadrature.hpp"
#include "polyext/specfun.hpp"

namespace polyext {

namespace sf = specfun;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double two_pi_factor(int n) { return std::pow(2.0 * std::numbers::pi, -0.5 * n); }

double binomial(int n, int k) { return sf::factorial(n) / (sf::factorial(k) * sf::factorial(n - k)); }

}  // namespace

// ---- check values --------------------------------------------------------

std::string compare_name(Compare c) {
  switch (c) {
    case Compare::absolute: return "abs";
    case Compare::relative: return "rel";
    case Compare::at_most: return "max";
    case Compare::at_least: return "min";
  }
  return "abs";
}

double CheckValue::abs_err() const { return expected ? std::abs(measured - *expected) : kNaN; }

double CheckValue::rel_err() const {
  if (!expected || *expected == 0.0) return kNaN;
  return std::abs(measured - *expected) / std::abs(*expected);
}

void CheckValue::judge() {
  if (!std::isfinite(measured)) {
    pass = false;
    return;
  }
  switch (compare) {
    case Compare::absolute: pass = expected && abs_err() <= tol; break;
    case Compare::relative: pass = expected && std::abs(measured - *expected) <= tol * std::abs(*expected); break;
    case Compare::at_most: pass = measured <= tol; break;
    case Compare::at_least: pass = expected && measured >= *expected * (1.0 - tol); break;
  }
}

CheckValue make_check(std::string name, std::vector<std::pair<std::string, std::string>> params, double measured,
                      std::optional<double> expected, double tol, Compare compare) {
  CheckValue c;
  c.name = std::move(name);
  c.params = std::move(params);
  c.measured = measured;
  c.expected = expected;
  c.tol = tol;
  c.compare = compare;
  c.judge();
  return c;
}

// ---- energies ------------------------------------------------------------

double weighted_energy(const ExtensionField& field, int k, double b, Exec exec) {
  const auto& wy = field.y_weights();
  if (wy.empty()) throw DomainError("weighted_energy: field has no y-quadrature weights");
  if (std::abs(field.y_weight_b() - b) > 1e-14) throw DomainError("weighted_energy: y weights built for another b");
  const auto d = polyharm_energy_density(field, k, b, exec);
  const RhoGrid& g = field.grid();
  const std::size_t ny = d.y.size();
  const auto rows = map_rows(exec, g.size(), [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t j = 0; j < ny; ++j) s += wy[j] * d.at(i, j);
    return g.weights[i] * std::pow(g.nodes[i], g.n - 1) * s;
  });
  const double total = pairwise_sum(rows);
  double peak = 0.0;
  for (double r : rows) peak = std::max(peak, std::abs(r));
  if (peak > 0.0 && std::abs(rows.back()) > 1e-8 * peak)
    throw DomainError("weighted_energy: rho tail not decayed (divergent or unresolved energy)");
  double top = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    top += g.weights[i] * std::pow(g.nodes[i], g.n - 1) * wy[ny - 1] * std::abs(d.at(i, ny - 1));
  if (total != 0.0 && top > 1e-8 * std::abs(total))
    throw DomainError("weighted_energy: y tail not decayed (divergent or unresolved energy)");
  return 2.0 * g.omega * total;
}

double trace_seminorm(const RadialSpectralFunction& u, double s) {
  const RhoGrid& g = u.grid();
  std::vector<double> sq(g.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = u.values()[i] * u.values()[i];
  return g.omega * integrate_rho(g, sq, g.n - 1.0 + 2.0 * s);
}

EnergyIdentity energy_identity(const RadialSpectralFunction& u, const FractionalOrder& order, const YQuadSpec& yspec,
                               Exec exec) {
  if (u.n() != order.n) throw DomainError("energy_identity: grid dimension differs from the order's n");
  EnergyIdentity r;
  const auto field = extend_on_quadrature(u, order.s, order.b, yspec, exec);
  r.energy = weighted_energy(field, order.extension_order(), order.b, exec);
  r.seminorm = trace_seminorm(u, order.s);
  r.expected = 2.0 * d_constant(order.s) * r.seminorm;
  r.gap = r.expected == 0.0 ? std::abs(r.energy) : std::abs(r.energy - r.expected) / r.expected;
  return r;
}

double energy_identity_gap(const RadialSpectralFunction& u, const FractionalOrder& order, const YQuadSpec& yspec,
                           Exec exec) {
  return energy_identity(u, order, yspec, exec).gap;
}

namespace {

// int_0^inf t^{mu-1} K_nu(t)^2 dt
double bessel_square_moment(double mu, double nu) {
  nu = std::abs(nu);
  if (!(0.5 * mu > nu)) throw DomainError("Bessel moment diverges at t = 0");
  return std::sqrt(std::numbers::pi) * sf::gamma(0.5 * mu + nu) * sf::gamma(0.5 * mu - nu) * sf::gamma(0.5 * mu) /
         (4.0 * sf::gamma(0.5 * mu + 0.5));
}

// int_0^inf t^{p} (K_nu^2 [+ K_{nu-1}^2]) dt by quadrature with the endpoint power absorbed.
double bessel_square_quadrature(double p, double nu, bool with_lower) {
  double lead = std::abs(nu);
  if (with_lower) lead = std::max(lead, std::abs(nu - 1.0));
  const double beta = p - 2.0 * lead;
  if (!(beta > -1.0)) throw DomainError("Bessel integral diverges at t = 0");
  const double rest = p - beta;
  auto f = [&](double t) {
    const double e = std::exp(-2.0 * t) * std::pow(t, rest);
    const double k0 = sf::bessel_k_scaled(nu, t);
    double v = k0 * k0;
    if (with_lower) {
      const double k1 = sf::bessel_k_scaled(nu - 1.0, t);
      v += k1 * k1;
    }
    return e * v;
  };
  return integrate_half_line(beta, 60.0, f);
}

double alpha_constant(double alpha, double b, int k, BesselMethod method) {
  if (!(alpha > 0.0)) throw DomainError("walphasumm_constant: alpha must be positive");
  const int j = k / 2;
  double P = 1.0;
  for (int i = 0; i < j; ++i) P *= 2.0 * (alpha - i) + b - 1.0;
  const double c = std::pow(2.0, 1.0 - alpha) / sf::gamma(alpha) * P;
  const double nu = alpha - j;
  const bool odd = k % 2 == 1;
  const double p = b + 2.0 * nu;
  double integral = 0.0;
  if (method == BesselMethod::quadrature) {
    integral = bessel_square_quadrature(p, nu, odd);
  } else {
    integral = bessel_square_moment(p + 1.0, nu);
    if (odd) integral += bessel_square_moment(p + 1.0, nu - 1.0);
  }
  return 2.0 * c * c * integral;
}

}  // namespace

double walphasumm_constant(double alpha, double s, int n, BesselMethod method) {
  const auto order = make_order(n, s);
  if (alpha != s) {
    if (order.int_part < 1) throw DomainError("walphasumm_constant: alpha != s needs [s] >= 1");
    if (!(alpha > std::floor(alpha) && std::floor(alpha) >= order.int_part))
      throw DomainError("walphasumm_constant: need alpha > [alpha] >= [s]");
  }
  return alpha_constant(alpha, order.b, order.extension_order(), method);
}

TraceConstantReport trace_constant_profile(double b) {
  if (!(b > -1.0 && b < 1.0)) throw DomainError("trace_constant_profile: need -1 < b < 1");
  TraceConstantReport r;
  r.b = b;
  const double sigma = 0.5 * (1.0 - b);
  r.profile_energy = alpha_constant(sigma, b, 1, BesselMethod::quadrature);
  r.two_d = 2.0 * d_constant(sigma);
  return r;
}

// ---- limits --------------------------------------------------------------

double dtn_residual_norm(const RadialSpectralFunction& u, const FractionalOrder& order, double y) {
  const RhoGrid& g = u.grid();
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double phi = y == 0.0 ? 0.0 : dtn_deficit(order.frac, std::abs(y) * g.nodes[i], DeficitKind::neumann);
    v[i] = u.values()[i] * u.values()[i] * phi * phi;
  }
  return g.omega * integrate_rho(g, v, g.n - 1.0 + 2.0 * order.s);
}

AxisPath parse_axis_path(const std::string& name) {
  if (name == "spectral") return AxisPath::spectral;
  if (name == "physical") return AxisPath::physical;
  throw DomainError("unknown axis path: " + name);
}

double laplacian_moment(const RadialSpectralFunction& u, int m) {
  if (m < 0) throw DomainError("laplacian_moment: negative order");
  const RhoGrid& g = u.grid();
  return two_pi_factor(g.n) * g.omega * integrate_rho(g, u.values(), g.n - 1.0 + 2.0 * m);
}

double taylor_remainder(const RadialSpectralFunction& u, const FractionalOrder& order, double y, AxisPath path) {
  const double e0 = path == AxisPath::spectral
                        ? axis_value_spectral(u, order.s, y)
                        : extend_axis_oracle(physical_profile(u.family(), u.n()), u.n(), order.s, y);
  double model = 0.0;
  for (int m = 0; m <= order.int_part; ++m)
    model += kappa(order.s, m) * std::pow(y, 2 * m) * laplacian_moment(u, m) / sf::factorial(2 * m);
  return e0 - model;
}

double limits_gap(const RadialSpectralFunction& u, const FractionalOrder& order, int m, double y, Exec exec) {
  if (m < 1 || m > order.int_part) throw DomainError("limits_gap: need 1 <= m <= [s]");
  if (!(y > 0.0)) throw DomainError("limits_gap: need y > 0");
  const auto field = extend(u, order.s, std::vector<double>{y}, exec);
  const auto d = delta_b_apply(field, order.b, DerivPath::analytic, m, exec);
  const double ratio = d_constant(order.s) / d_constant(order.s - m);
  const double sign = m % 2 ? -1.0 : 1.0;
  const RhoGrid& g = u.grid();
  std::vector<double> diff(g.size()), ref(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double target = ratio * std::pow(g.nodes[i], 2 * m) * u.values()[i];
    const double got = sign * d.at(i, 0);
    diff[i] = (got - target) * (got - target);
    ref[i] = target * target;
  }
  const double p = g.n - 1.0 + 2.0 * (order.s - 2.0 * m);
  const double den = integrate_rho(g, ref, p);
  if (den == 0.0) return 0.0;
  return std::sqrt(integrate_rho(g, diff, p) / den);
}

double recursion_residual(const RadialSpectralFunction& u, const FractionalOrder& order, int m, double y) {
  if (m < 1 || m > order.int_part) throw DomainError("recursion_residual: need 1 <= m <= [s]");
  if (!(y > 0.0)) throw DomainError("recursion_residual: need y != 0");
  const double s = order.s;
  const double b = order.b;
  const ModeExpr lhs_expr = delta_b_tower(s, b, m);
  // L_b^{m-1} m_s = P c_s f_{s-m+1} and t^{-1} f_mu' = -t^{mu-1} K_{mu-1}
  double P = 1.0;
  for (int i = 0; i < m - 1; ++i) P *= -(2.0 * (s - i) + b - 1.0);
  const double c = std::pow(2.0, 1.0 - s) / sf::gamma(s);
  const double sign = m % 2 ? -1.0 : 1.0;
  const double nu = s - m;
  double worst = 0.0;
  const RhoGrid& g = u.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (u.values()[i] == 0.0) continue;
    const double t = y * g.nodes[i];
    const double lhs = sign * lhs_expr.eval(t);
    const double rhs = 2.0 * (1.0 + order.int_part - m) * sign * (-P * c) * std::exp(nu * std::log(t) - t) *
                       sf::bessel_k_scaled(nu, t);
    if (rhs == 0.0 && lhs == 0.0) continue;
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(rhs), std::abs(lhs)));
  }
  return worst;
}

double kappa_fd(double s, int m) {
  const auto order = make_order(std::max(3, static_cast<int>(2.0 * s) + 1), s);
  if (m < 0 || m > order.int_part) throw DomainError("kappa_fd: need 0 <= m <= [s]");
  if (m == 0) return multiplier(s, 0.0);
  // error exponents of the centred 2m-th difference of m_s(|t|)
  std::vector<double> ex;
  for (int j = 1; j <= 8; ++j) ex.push_back(2.0 * j);
  for (int j = 0; j <= 8; ++j) {
    const double e = 2.0 * s - 2.0 * m + 2.0 * j;
    if (e > 0.0) ex.push_back(e);
  }
  std::sort(ex.begin(), ex.end());
  const int levels = 8;
  ex.resize(levels - 1);
  std::vector<double> T(levels);
  const double h0 = 4.0;  // m_s(|t|) is entire in t^2 and t^{2s}, so wide steps are safe
  for (int l = 0; l < levels; ++l) {
    const double h = h0 * std::ldexp(1.0, -l);
    double acc = 0.0;
    for (int i = 0; i <= 2 * m; ++i) {
      const double sg = i % 2 ? -1.0 : 1.0;
      acc += sg * binomial(2 * m, i) * multiplier(s, std::abs(m - i) * h);
    }
    T[l] = acc / std::pow(h, 2 * m);
  }
  // eliminate one exponent per sweep
  for (int e = 0; e < levels - 1; ++e) {
    const double f = std::pow(2.0, ex[e]);
    for (int l = levels - 1; l > e; --l) T[l] = (f * T[l] - T[l - 1]) / (f - 1.0);
  }
  return T[levels - 1];
}

// ---- Hardy ---------------------------------------------------------------

namespace {

struct Lattice {
  std::vector<double> r, y, v;
  double at(std::size_t i, std::size_t j) const { return v[i * y.size() + j]; }
};

Lattice lattice_delta_b(const Lattice& L, int n, double b) {
  if (L.r.size() < 3 || L.y.size() < 3) throw DomainError("hardy_quotient: lattice too small for the tower");
  Lattice out;
  out.r.assign(L.r.begin(), L.r.end() - 1);
  out.y.assign(L.y.begin(), L.y.end() - 1);
  out.v.resize(out.r.size() * out.y.size());
  for (std::size_t i = 0; i < out.r.size(); ++i) {
    for (std::size_t j = 0; j < out.y.size(); ++j) {
      const double u0 = L.at(i, j);
      double dx, dy;
      if (L.r[i] == 0.0) {
        dx = n * 2.0 * (L.at(1, j) - u0) / (L.r[1] * L.r[1]);
      } else {
        const double hm = L.r[i] - L.r[i - 1], hp = L.r[i + 1] - L.r[i];
        const double um = L.at(i - 1, j), up = L.at(i + 1, j);
        const double d1 = (-hp / (hm * (hm + hp))) * um + ((hp - hm) / (hm * hp)) * u0 + (hm / (hp * (hm + hp))) * up;
        const double d2 = 2.0 * (um / (hm * (hm + hp)) - u0 / (hm * hp) + up / (hp * (hm + hp)));
        dx = d2 + (n - 1.0) / L.r[i] * d1;
      }
      if (L.y[j] == 0.0) {
        dy = (1.0 + b) * 2.0 * (L.at(i, 1) - u0) / (L.y[1] * L.y[1]);
      } else {
        const double hm = L.y[j] - L.y[j - 1], hp = L.y[j + 1] - L.y[j];
        const double um = L.at(i, j - 1), up = L.at(i, j + 1);
        const double d1 = (-hp / (hm * (hm + hp))) * um + ((hp - hm) / (hm * hp)) * u0 + (hm / (hp * (hm + hp))) * up;
        const double d2 = 2.0 * (um / (hm * (hm + hp)) - u0 / (hm * hp) + up / (hp * (hm + hp)));
        dy = d2 + b / L.y[j] * d1;
      }
      out.v[i * out.y.size() + j] = dx + dy;
    }
  }
  return out;
}

Lattice lattice_grad_squared(const Lattice& L) {
  Lattice out;
  out.r.assign(L.r.begin(), L.r.end() - 1);
  out.y.assign(L.y.begin(), L.y.end() - 1);
  out.v.resize(out.r.size() * out.y.size());
  auto d1 = [](double xm, double x0, double xp, double um, double u0, double up) {
    const double hm = x0 - xm, hp = xp - x0;
    return (-hp / (hm * (hm + hp))) * um + ((hp - hm) / (hm * hp)) * u0 + (hm / (hp * (hm + hp))) * up;
  };
  for (std::size_t i = 0; i < out.r.size(); ++i)
    for (std::size_t j = 0; j < out.y.size(); ++j) {
      const double gr = L.r[i] == 0.0 ? 0.0
                                      : d1(L.r[i - 1], L.r[i], L.r[i + 1], L.at(i - 1, j), L.at(i, j), L.at(i + 1, j));
      const double gy = L.y[j] == 0.0 ? 0.0
                                      : d1(L.y[j - 1], L.y[j], L.y[j + 1], L.at(i, j - 1), L.at(i, j), L.at(i, j + 1));
      out.v[i * out.y.size() + j] = gr * gr + gy * gy;
    }
  return out;
}

std::vector<double> trapezoid_weights(const std::vector<double>& x) {
  std::vector<double> w(x.size(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double h = 0.5 * (x[i + 1] - x[i]);
    w[i] += h;
    w[i + 1] += h;
  }
  return w;
}

double lattice_integral(const Lattice& L, int n, double b, double q, bool squared) {
  const auto wr = trapezoid_weights(L.r);
  const auto wy = trapezoid_weights(L.y);
  double total = 0.0;
  for (std::size_t i = 0; i < L.r.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < L.y.size(); ++j) {
      const double r = L.r[i], y = L.y[j];
      const double z2 = r * r + y * y;
      if ((y == 0.0 && b < 0.0) || (z2 == 0.0 && q > 0.0)) continue;
      const double wt = (b == 0.0 ? 1.0 : std::pow(y, b)) * (q == 0.0 ? 1.0 : std::pow(z2, -q));
      const double v = squared ? L.at(i, j) * L.at(i, j) : L.at(i, j);
      row += wy[j] * wt * v;
    }
    total += wr[i] * std::pow(L.r[i], n - 1) * row;
  }
  return 2.0 * sphere_area(n) * total;
}

}  // namespace

HardyQuotient hardy_quotient(const PhysicalField& U, const HardyParams& p, const PolarSpec& spec, Exec exec) {
  if (!p.admissible()) throw DomainError("hardy_quotient: inadmissible parameters " + p.describe());
  if (U.n() != p.n) throw DomainError("hardy_quotient: field dimension differs from n");
  HardyQuotient h;
  const double hc = hardy_constant(p);
  h.bound = hc * hc;
  if (const auto& fam = U.family()) {
    if (!(fam->min_decay() > 0.0)) throw DomainError("hardy_quotient: field does not decay");
    const PolyExp w = fam->delta_b_power(p.n, p.b, p.k / 2);
    const PolyExp wp = w.d_p(), wq = w.d_q();
    const bool odd = p.k % 2 == 1;
    auto top = [&](double r, double y) {
      const double pp = r * r, qq = y * y;
      if (!odd) {
        const double v = w.at_pq(pp, qq);
        return v * v;
      }
      const double a = wp.at_pq(pp, qq), c = wq.at_pq(pp, qq);
      return 4.0 * pp * a * a + 4.0 * qq * c * c;
    };
    auto base = [&](double r, double y) {
      const double v = fam->at_pq(r * r, y * y);
      return v * v;
    };
    h.numerator = integrate_physical(p.n, {p.b, p.a}, top, spec, exec);
    h.denominator = integrate_physical(p.n, {p.b, p.a + p.k}, base, spec, exec);
  } else {
    h.finite_difference = true;
    Lattice L{U.r(), U.y(), U.values()};
    if (L.r.empty() || L.y.empty() || L.r.front() != 0.0 || L.y.front() != 0.0)
      throw DomainError("hardy_quotient: lattice must start at r = 0 and y = 0");
    double edge = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < L.r.size(); ++i)
      for (std::size_t j = 0; j < L.y.size(); ++j) {
        const double a = std::abs(L.at(i, j));
        peak = std::max(peak, a);
        if (i + 1 == L.r.size() || j + 1 == L.y.size()) edge = std::max(edge, a);
      }
    if (edge > 1e-6 * peak) throw DomainError("hardy_quotient: field does not decay within the lattice");
    h.denominator = lattice_integral(L, p.n, p.b, p.a + p.k, true);
    Lattice t = L;
    for (int i = 0; i < p.k / 2; ++i) t = lattice_delta_b(t, p.n, p.b);
    if (p.k % 2 == 1) {
      t = lattice_grad_squared(t);
      h.numerator = lattice_integral(t, p.n, p.b, p.a, false);
    } else {
      h.numerator = lattice_integral(t, p.n, p.b, p.a, true);
    }
  }
  if (!(h.denominator > 0.0)) throw DomainError("hardy_quotient: zero field");
  h.quotient = h.numerator / h.denominator;
  return h;
}

// ---- integration by parts ------------------------------------------------

IbpCheck parse_ibp_check(const std::string& name) {
  if (name == "step1") return IbpCheck::step1;
  if (name == "orthogonality") return IbpCheck::orthogonality;
  if (name == "normal_flux") return IbpCheck::normal_flux;
  throw DomainError("unknown ibp check: " + name);
}

double ibp_step1(const PolyExp& W, const PolyExp& V, int n, int k, double b, const PolarSpec& spec, Exec exec) {
  if (k < 2) throw DomainError("ibp_step1: need k >= 2");
  if (!(b > -1.0 && b < 1.0)) throw DomainError("ibp_step1: need -1 < b < 1");
  if (!(W.min_decay() > 0.0 && V.min_decay() > 0.0)) throw DomainError("ibp_step1: fields must decay");
  const PolyExp lw = W.delta_b_power(n, b, k - 1);
  const PolyExp lv = V.delta_b(n, b);
  const double sign = k % 2 ? -1.0 : 1.0;  // (-1)^{k-1} (-1)
  const double lhs = integrate_physical(
      n, {b, 0.0}, [&](double r, double y) { return sign * lw(r, y) * lv(r, y); }, spec, exec);
  const PolyExp aw = W.delta_b_power(n, b, k / 2);
  const PolyExp av = V.delta_b_power(n, b, k / 2);
  double rhs;
  if (k % 2 == 0) {
    rhs = integrate_physical(n, {b, 0.0}, [&](double r, double y) { return aw(r, y) * av(r, y); }, spec, exec);
  } else {
    const PolyExp awp = aw.d_p(), awq = aw.d_q(), avp = av.d_p(), avq = av.d_q();
    rhs = integrate_physical(
        n, {b, 0.0},
        [&](double r, double y) {
          const double pp = r * r, qq = y * y;
          return 4.0 * pp * awp.at_pq(pp, qq) * avp.at_pq(pp, qq) + 4.0 * qq * awq.at_pq(pp, qq) * avq.at_pq(pp, qq);
        },
        spec, exec);
  }
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
}

double ibp_orthogonality(const RadialSpectralFunction& u, const FractionalOrder& order, const PolyExp& V,
                         const YQuadSpec& yspec, Exec exec) {
  if (u.n() != order.n) throw DomainError("ibp_orthogonality: grid dimension differs from the order's n");
  const double lambda = V.lambda();
  if (!(lambda > 0.0 && V.mu() > 0.0)) throw DomainError("ibp_orthogonality: V must decay");
  PolyExp h(0.0, V.mu());
  for (const auto& [key, c] : V.coefficients()) {
    if (key.first != 0) throw DomainError("ibp_orthogonality: V must have the form e^{-lambda r^2} h(y)");
    if (key.second == 0) throw DomainError("ibp_orthogonality: V has a nonzero trace");
    h.add(0, key.second, c);
  }
  if (h.is_zero()) throw DomainError("ibp_orthogonality: V is zero");
  const int n = order.n;
  const double b = order.b;
  const int k = order.extension_order();
  const int j0 = k / 2;
  const bool odd = k % 2 == 1;
  // D^l h and its q-derivative, with D the y part of Delta_b
  std::vector<PolyExp> dh{h}, dhq;
  for (int l = 1; l <= j0; ++l) dh.push_back(dh.back().delta_b(n, b));
  for (const auto& f : dh) dhq.push_back(f.d_q());
  const ModeExpr g = delta_b_tower(order.s, b, j0);
  const ModeExpr gd = g.derivative();
  const auto rule = y_quadrature(b, yspec);
  const RhoGrid& G = u.grid();
  struct Acc {
    double ev, ee, vv;
  };
  std::vector<Acc> acc(G.size());
  map_rows(exec, G.size(), [&](std::size_t i) {
    const double rho = G.nodes[i];
    const double rho2 = rho * rho;
    const double vhat = std::pow(2.0 * lambda, -0.5 * n) * std::exp(-rho2 / (4.0 * lambda));
    const double amp = std::pow(rho, 2 * j0) * u.values()[i];
    std::vector<double> coef(j0 + 1);
    for (int l = 0; l <= j0; ++l) coef[l] = binomial(j0, l) * std::pow(-rho2, j0 - l);
    Acc a{0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < rule.size(); ++j) {
      const double y = rule.nodes[j];
      const double q = y * y;
      const double t = y * rho;
      const double A = amp * g.eval(t);
      double B = 0.0, By = 0.0;
      for (int l = 0; l <= j0; ++l) {
        B += coef[l] * dh[l].at_pq(0.0, q);
        if (odd) By += coef[l] * 2.0 * y * dhq[l].at_pq(0.0, q);
      }
      B *= vhat;
      By *= vhat;
      double ev, ee, vv;
      if (odd) {
        const double Ay = amp * rho * gd.eval(t);
        ev = rho2 * A * B + Ay * By;
        ee = rho2 * A * A + Ay * Ay;
        vv = rho2 * B * B + By * By;
      } else {
        ev = A * B;
        ee = A * A;
        vv = B * B;
      }
      a.ev += rule.weights[j] * ev;
      a.ee += rule.weights[j] * ee;
      a.vv += rule.weights[j] * vv;
    }
    acc[i] = a;
    return 0.0;
  });
  std::vector<double> ev(G.size()), ee(G.size()), vv(G.size());
  for (std::size_t i = 0; i < G.size(); ++i) {
    ev[i] = acc[i].ev;
    ee[i] = acc[i].ee;
    vv[i] = acc[i].vv;
  }
  const double p = n - 1.0;
  const double pair = integrate_rho(G, ev, p);
  const double en = integrate_rho(G, ee, p) * integrate_rho(G, vv, p);
  if (!(en > 0.0)) throw DomainError("ibp_orthogonality: zero energy");
  return std::abs(pair) / std::sqrt(en);
}

double normal_flux(const RadialSpectralFunction& u, const FractionalOrder& order, int m, double y) {
  if (m < 1 || 2 * m > order.extension_order()) throw DomainError("normal_flux: need 1 <= m <= (1+[s])/2");
  if (!(y > 0.0)) throw DomainError("normal_flux: need y > 0");
  const double b = order.b;
  const ModeExpr gd = delta_b_tower(order.s, b, m - 1).derivative();
  const RhoGrid& g = u.grid();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double rho = g.nodes[i];
    const double scale = std::pow(rho, 2.0 * m - 1.0 - b) * u.values()[i];
    const double t = y * rho;
    num = std::max(num, std::abs(scale * std::pow(t, b) * gd.eval(t)));
    den = std::max(den, std::abs(scale));
  }
  if (den == 0.0) return 0.0;
  return num / den;
}

// ---- boundedness ---------------------------------------------------------

PhysicalExtension::PhysicalExtension(const SpectralFamily& family, int n, double alpha, double rho_cut)
    : n_(n), alpha_(alpha) {
  if (!(alpha > 0.0)) throw DomainError("PhysicalExtension: alpha must be positive");
  const int panels = static_cast<int>(std::ceil(rho_cut / 0.25));
  std::vector<double> edges(panels + 1);
  for (int i = 0; i <= panels; ++i) edges[i] = rho_cut * i / panels;
  const auto rule = quad::composite(edges, 12);
  rho_ = rule.nodes;
  w_.resize(rho_.size());
  for (std::size_t i = 0; i < rho_.size(); ++i) w_[i] = rule.weights[i] * family(rho_[i]) * std::pow(rho_[i], n - 1);
}

namespace {

// Lambda(x) = x^{1-n/2} J_{n/2-1}(x), so that u(r) = int u_hat(rho) Lambda(r rho) rho^{n-1} d rho.
double hankel_factor(int n, double x) {
  const double nu = 0.5 * n - 1.0;
  if (x < 1e-8) return std::pow(2.0, -nu) / sf::gamma(nu + 1.0);
  return std::cyl_bessel_j(nu, x) * std::pow(x, -nu);
}

}  // namespace

double PhysicalExtension::operator()(double r, double y) const {
  double s = 0.0;
  for (std::size_t i = 0; i < rho_.size(); ++i)
    s += w_[i] * hankel_factor(n_, r * rho_[i]) * multiplier(alpha_, std::abs(y) * rho_[i]);
  return s;
}

std::vector<BoundednessRatio> boundedness_ratios(const SpectralFamily& family, const FractionalOrder& order,
                                                 const BoundednessSpec& spec, Exec exec) {
  const int n = order.n;
  const auto u = physical_profile(family, n);
  const double den =
      sphere_area(n) * integrate_half_line(n - 1.0 - 2.0 * order.s, 30.0, [&](double r) { return u(r) * u(r); });
  const double q = order.extension_order();
  if (!(n + order.b - 2.0 * q > -1.0)) throw DomainError("boundedness_ratios: weight not integrable at the origin");
  // product rule in (r, y): E on the lattice is a matrix product over the rho nodes
  const auto rr = quad::power_endpoint(n - 1.0, spec.z_max, spec.h0, spec.panels_per_decade, spec.order);
  const auto yy = quad::power_endpoint(order.b, spec.z_max, spec.h0, spec.panels_per_decade, spec.order);
  std::vector<double> alphas;
  for (double a : {order.frac, order.frac + 1.0, order.s, order.s + 1.0})
    if (std::find(alphas.begin(), alphas.end(), a) == alphas.end()) alphas.push_back(a);
  std::vector<BoundednessRatio> out;
  for (double alpha : alphas) {
    const PhysicalExtension E(family, n, alpha, spec.rho_cut);
    const auto& rho = E.nodes();
    const auto& w = E.weights();
    const std::size_t nr = rho.size();
    std::vector<double> M(yy.size() * nr);
    for (std::size_t j = 0; j < yy.size(); ++j)
      for (std::size_t i = 0; i < nr; ++i) M[j * nr + i] = w[i] * multiplier(alpha, yy.nodes[j] * rho[i]);
    const double total = sum_rows(exec, rr.size(), [&](std::size_t a) {
      const double r = rr.nodes[a];
      std::vector<double> lam(nr);
      for (std::size_t i = 0; i < nr; ++i) lam[i] = hankel_factor(n, r * rho[i]);
      double row = 0.0;
      for (std::size_t j = 0; j < yy.size(); ++j) {
        double e = 0.0;
        for (std::size_t i = 0; i < nr; ++i) e += M[j * nr + i] * lam[i];
        const double y = yy.nodes[j];
        row += yy.weights[j] * std::pow(r * r + y * y, -q) * e * e;
      }
      return rr.weights[a] * row;
    });
    BoundednessRatio br;
    br.alpha = alpha;
    br.numerator = 2.0 * sphere_area(n) * total;
    br.denominator = den;
    br.ratio = br.numerator / den;
    out.push_back(br);
  }
  return out;
}

// ---- covariance ----------------------------------------------------------

ScalingExponents scaling_exponents(const RadialSpectralFunction& u, const FractionalOrder& order, double lambda,
                                   const YQuadSpec& yspec, Exec exec) {
  if (!(lambda > 0.0 && lambda != 1.0)) throw DomainError("scaling_exponents: need lambda > 0, lambda != 1");
  SpectralFamily f = u.family();
  f.scale *= lambda;
  f.amplitude *= std::pow(lambda, u.n());
  const RadialSpectralFunction v(u.grid_ptr(), f);
  const auto a = energy_identity(u, order, yspec, exec);
  const auto b = energy_identity(v, order, yspec, exec);
  ScalingExponents e;
  const double ll = std::log(lambda);
  e.seminorm = std::log(b.seminorm / a.seminorm) / ll;
  e.energy = std::log(b.energy / a.energy) / ll;
  e.expected = u.n() - 2.0 * order.s;
  return e;
}

}  // namespace polyext
