#include "polyext/extension.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "polyext/orders.hpp"
#include "polyext/specfun.hpp"

namespace polyext {

namespace sf = specfun;

// ---- ModeExpr ------------------------------------------------------------

ModeExpr ModeExpr::multiplier(double alpha) {
  if (!(alpha > 0.0)) throw DomainError("ModeExpr::multiplier: alpha must be positive");
  return basis(std::pow(2.0, 1.0 - alpha) / sf::gamma(alpha), 0, alpha);
}

ModeExpr ModeExpr::basis(double coef, int q, double mu) {
  ModeExpr e;
  e.add(coef, q, mu);
  e.reduce();
  return e;
}

void ModeExpr::add(double coef, int q, double mu) {
  if (coef == 0.0) return;
  for (auto& t : terms_) {
    if (t.q == q && std::abs(t.mu - mu) < 1e-12) {
      t.coef += coef;
      return;
    }
  }
  terms_.push_back({coef, q, mu});
}

void ModeExpr::reduce() {
  // t^2 f_nu = f_{nu+2} - 2(nu+1) f_{nu+1}, applied until every q < 2.
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Term> old;
    old.swap(terms_);
    for (const auto& t : old) {
      if (t.q >= 2) {
        add(t.coef, t.q - 2, t.mu + 2.0);
        add(-2.0 * (t.mu + 1.0) * t.coef, t.q - 2, t.mu + 1.0);
        changed = true;
      } else {
        add(t.coef, t.q, t.mu);
      }
    }
  }
  double scale = 0.0;
  for (const auto& t : terms_) scale = std::max(scale, std::abs(t.coef));
  std::erase_if(terms_, [scale](const Term& t) { return t.coef == 0.0 || std::abs(t.coef) < 1e-15 * scale; });
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) {
    return a.mu != b.mu ? a.mu > b.mu : a.q < b.q;
  });
}

ModeExpr& ModeExpr::operator+=(const ModeExpr& o) {
  for (const auto& t : o.terms_) add(t.coef, t.q, t.mu);
  reduce();
  return *this;
}

ModeExpr ModeExpr::scaled(double c) const {
  ModeExpr r;
  for (const auto& t : terms_) r.add(c * t.coef, t.q, t.mu);
  r.reduce();
  return r;
}

ModeExpr ModeExpr::times_t(int k) const {
  ModeExpr r;
  for (const auto& t : terms_) r.add(t.coef, t.q + k, t.mu);
  r.reduce();
  return r;
}

ModeExpr ModeExpr::derivative() const {
  // d/dt [t^q f_mu] = q t^{q-1} f_mu - t^{q+1} f_{mu-1}
  ModeExpr r;
  for (const auto& t : terms_) {
    if (t.q != 0) r.add(t.coef * t.q, t.q - 1, t.mu);
    r.add(-t.coef, t.q + 1, t.mu - 1.0);
  }
  r.reduce();
  return r;
}

ModeExpr ModeExpr::derivative(int j) const {
  if (j < 0) throw DomainError("ModeExpr::derivative: negative order");
  ModeExpr r = *this;
  for (int k = 0; k < j; ++k) r = r.derivative();
  return r;
}

ModeExpr ModeExpr::inv_t_derivative() const { return derivative().times_t(-1); }

ModeExpr ModeExpr::delta_b(double b) const {
  ModeExpr r = derivative(2);
  r += inv_t_derivative().scaled(b);
  r += scaled(-1.0);
  return r;
}

double ModeExpr::eval(double t) const {
  if (t < 0.0) throw DomainError("ModeExpr::eval: t must be >= 0");
  double s = 0.0;
  if (t == 0.0) {
    for (const auto& term : terms_) {
      const double nu = std::abs(term.mu);
      if (nu == 0.0) {
        if (term.q > 0) continue;
        throw DomainError("ModeExpr::eval: term diverges at t = 0");
      }
      const double e = term.q + term.mu - nu;
      if (e > 0.0) continue;
      if (e < 0.0) throw DomainError("ModeExpr::eval: term diverges at t = 0");
      s += term.coef * std::pow(2.0, nu - 1.0) * sf::gamma(nu);
    }
    return s;
  }
  const double lt = std::log(t);
  for (const auto& term : terms_) {
    const double k = sf::bessel_k_scaled(term.mu, t);
    s += term.coef * std::exp((term.q + term.mu) * lt - t) * k;
  }
  return s;
}

ModeExpr delta_b_tower(double alpha, double b, int power) {
  if (power < 0) throw DomainError("delta_b_tower: negative power");
  ModeExpr e = ModeExpr::multiplier(alpha);
  for (int p = 0; p < power; ++p) e = e.delta_b(b);
  return e;
}

// ---- ModeProfile ---------------------------------------------------------

double ModeProfile::value(double y) const { return polyext::multiplier(alpha, std::abs(y) * rho); }

double ModeProfile::d1(double y) const {
  if (y == 0.0) return 0.0;
  const double s = y > 0 ? 1.0 : -1.0;
  return s * rho * ModeExpr::multiplier(alpha).derivative().eval(std::abs(y) * rho);
}

double ModeProfile::d2(double y) const {
  return rho * rho * ModeExpr::multiplier(alpha).derivative(2).eval(std::abs(y) * rho);
}

DerivPath parse_deriv_path(const std::string& name) {
  if (name == "analytic") return DerivPath::analytic;
  if (name == "finite_difference" || name == "fd") return DerivPath::finite_difference;
  throw DomainError("unknown derivative path: " + name);
}

// ---- extension -----------------------------------------------------------

namespace {

std::vector<double> trace_of(const ExtensionField& f) {
  if (f.trace().empty()) throw DomainError("extension field carries no trace samples");
  return f.trace();
}

// Fills a rho-major lattice row by row under the execution policy.
std::vector<double> fill_rows(Exec exec, std::size_t rows, std::size_t cols,
                              const std::function<void(std::size_t, double*)>& row) {
  std::vector<double> out(rows * cols);
  map_rows(exec, rows, [&](std::size_t i) {
    row(i, out.data() + i * cols);
    return 0.0;
  });
  return out;
}

}  // namespace

ExtensionField extend(const RadialSpectralFunction& u, double alpha, const std::vector<double>& y, Exec exec) {
  if (!(alpha > 0.0)) throw DomainError("extend: alpha must be positive");
  for (double v : y)
    if (v < 0.0) throw DomainError("extend: heights must be >= 0 (even extension)");
  const RhoGrid& g = u.grid();
  const auto& uh = u.values();
  auto values = fill_rows(exec, g.size(), y.size(), [&](std::size_t i, double* row) {
    for (std::size_t j = 0; j < y.size(); ++j) row[j] = uh[i] * polyext::multiplier(alpha, y[j] * g.nodes[i]);
  });
  return ExtensionField(u.grid_ptr(), y, alpha, std::move(values), uh, u.family());
}

ExtensionField extend(const RadialSpectralFunction& u, double alpha, const YLadder& ladder, Exec exec) {
  return extend(u, alpha, ladder.nodes, exec);
}

ExtensionField extend_on_quadrature(const RadialSpectralFunction& u, double alpha, double b, const YQuadSpec& spec,
                                    Exec exec) {
  const auto rule = y_quadrature(b, spec);
  ExtensionField f = extend(u, alpha, rule.nodes, exec);
  f.set_y_weights(rule.weights, b);
  return f;
}

double axis_value_spectral(const RadialSpectralFunction& u, double alpha, double y) {
  const RhoGrid& g = u.grid();
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = u.values()[i] * polyext::multiplier(alpha, std::abs(y) * g.nodes[i]);
  return std::pow(2.0 * std::numbers::pi, -0.5 * g.n) * g.omega * integrate_rho(g, v, g.n - 1.0);
}

double extend_axis_oracle(const std::function<double(double)>& u, int n, double alpha, double y) {
  if (!(alpha > 0.0)) throw DomainError("extend_axis_oracle: alpha must be positive");
  y = std::abs(y);
  if (y == 0.0) return u(0.0);
  const double beta = 2.0 * alpha - 1.0;
  const double half_pi = 0.5 * std::numbers::pi;
  const double h0 = std::min(1e-3 * y, 1e-3);
  const auto rule = quad::power_endpoint_graded(beta, half_pi, h0, half_pi, half_pi, 10, 16);
  double total = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double phi = rule.nodes[k];
    const double s = std::sin(phi);
    const double c = std::cos(phi);
    const double f = u(y * c / s) * std::pow(c, n - 1) * std::pow(s / phi, beta);
    total += rule.weights[k] * f;
  }
  return poisson_normalizer(n, alpha) * sphere_area(n) * total;
}

RadialSpectralFunction frac_laplacian(const RadialSpectralFunction& u, double exponent) {
  if (!(exponent > 0.0)) throw DomainError("frac_laplacian: exponent must be positive");
  SpectralFamily f = u.family();
  f.rho_power += exponent;
  return RadialSpectralFunction(u.grid_ptr(), f);
}

// ---- operators on extension fields ---------------------------------------

namespace {

struct Stencil {
  double wm, w0, wp;
};

// Three-point first and second derivative weights on nonuniform spacing.
Stencil first_derivative(double hm, double hp) {
  return {-hp / (hm * (hm + hp)), (hp - hm) / (hm * hp), hm / (hp * (hm + hp))};
}

Stencil second_derivative(double hm, double hp) {
  return {2.0 / (hm * (hm + hp)), -2.0 / (hm * hp), 2.0 / (hp * (hm + hp))};
}

// Output heights for the finite-difference path and the warnings it implies.
std::vector<std::size_t> fd_nodes(const std::vector<double>& y, std::vector<std::string>& warnings) {
  if (y.size() < 3) throw DomainError("finite-difference path needs at least 3 y nodes");
  for (std::size_t j = 1; j < y.size(); ++j)
    if (!(y[j] > y[j - 1])) throw DomainError("finite-difference path needs strictly increasing y nodes");
  std::vector<std::size_t> idx;
  if (y[0] == 0.0) {
    idx.push_back(0);
  } else {
    warnings.push_back("no y=0 sentinel: lowest node y=" + format_double(y[0]) + " skipped");
  }
  for (std::size_t j = 1; j + 1 < y.size(); ++j) idx.push_back(j);
  warnings.push_back("top node y=" + format_double(y.back()) + " skipped (one-sided stencil)");
  return idx;
}

void check_ladder_density(const std::vector<double>& y) {
  // need >= 5 nodes per decade over the positive part
  std::vector<double> pos;
  for (double v : y)
    if (v > 0.0) pos.push_back(v);
  if (pos.size() < 3) throw DomainError("finite-difference path: too few positive y nodes");
  const double decades = std::log10(pos.back() / pos.front());
  if (decades > 0.0 && (pos.size() - 1) / decades < 5.0)
    throw DomainError("finite-difference path needs >= 5 ladder nodes per decade");
}

double fd_value(const ExtensionField& f, std::size_t i, std::size_t j, double b, double rho, bool delta, int order) {
  const auto& y = f.y();
  const double e0 = f.at(i, j);
  if (y[j] == 0.0) {
    const double e1 = f.at(i, j + 1);
    const double eyy = 2.0 * (e1 - e0) / (y[1] * y[1]);  // even reflection
    if (delta) return -rho * rho * e0 + (1.0 + b) * eyy;
    return order == 1 ? 0.0 : eyy;
  }
  const double hm = y[j] - y[j - 1];
  const double hp = y[j + 1] - y[j];
  const double em = f.at(i, j - 1);
  const double ep = f.at(i, j + 1);
  const auto s1 = first_derivative(hm, hp);
  const auto s2 = second_derivative(hm, hp);
  const double ey = s1.wm * em + s1.w0 * e0 + s1.wp * ep;
  const double eyy = s2.wm * em + s2.w0 * e0 + s2.wp * ep;
  if (delta) return -rho * rho * e0 + eyy + b / y[j] * ey;
  return order == 1 ? ey : eyy;
}

}  // namespace

ModeSamples delta_b_apply(const ExtensionField& field, double b, DerivPath path, int power, Exec exec) {
  if (!(b > -1.0 && b < 1.0)) throw DomainError("delta_b_apply: need -1 < b < 1");
  if (power < 1) throw DomainError("delta_b_apply: power must be >= 1");
  const RhoGrid& g = field.grid();
  ModeSamples out;
  out.grid = field.grid_ptr();
  if (path == DerivPath::finite_difference) {
    if (power != 1) throw DomainError("delta_b_apply: finite-difference path supports power 1 only");
    check_ladder_density(field.y());
    const auto idx = fd_nodes(field.y(), out.warnings);
    for (std::size_t j : idx) out.y.push_back(field.y()[j]);
    out.values = fill_rows(exec, g.size(), idx.size(), [&](std::size_t i, double* row) {
      for (std::size_t k = 0; k < idx.size(); ++k) row[k] = fd_value(field, i, idx[k], b, g.nodes[i], true, 0);
    });
    return out;
  }
  const auto uh = trace_of(field);
  const ModeExpr top = delta_b_tower(field.alpha(), b, power);
  const ModeExpr below = delta_b_tower(field.alpha(), b, power - 1);
  const bool has_zero = std::find(field.y().begin(), field.y().end(), 0.0) != field.y().end();
  // even limit at y = 0: Delta_b w = -w + (1 + b) w'' per unit-frequency mode
  const double at_zero = has_zero ? -below.eval(0.0) + (1.0 + b) * below.derivative(2).eval(0.0) : 0.0;
  out.y = field.y();
  out.values = fill_rows(exec, g.size(), out.y.size(), [&](std::size_t i, double* row) {
    const double rho = g.nodes[i];
    const double scale = std::pow(rho, 2 * power) * uh[i];
    for (std::size_t j = 0; j < out.y.size(); ++j) {
      const double y = out.y[j];
      row[j] = scale * (y == 0.0 ? at_zero : top.eval(y * rho));
    }
  });
  return out;
}

ModeSamples polyharm_energy_density(const ExtensionField& field, int k, double b, Exec exec) {
  if (k < 1) throw DomainError("polyharm_energy_density: k must be >= 1");
  if (!(b > -1.0 && b < 1.0)) throw DomainError("polyharm_energy_density: need -1 < b < 1");
  const RhoGrid& g = field.grid();
  const auto uh = trace_of(field);
  const ModeExpr w = delta_b_tower(field.alpha(), b, k / 2);
  const bool odd = k % 2 == 1;
  const ModeExpr wd = odd ? w.derivative() : ModeExpr();
  ModeSamples out;
  out.grid = field.grid_ptr();
  out.y = field.y();
  out.values = fill_rows(exec, g.size(), out.y.size(), [&](std::size_t i, double* row) {
    const double rho = g.nodes[i];
    const double amp = std::pow(rho, k) * uh[i];
    const double a2 = amp * amp;
    for (std::size_t j = 0; j < out.y.size(); ++j) {
      const double t = out.y[j] * rho;
      const double v = w.eval(t);
      row[j] = odd ? a2 * (v * v + std::pow(wd.eval(t), 2)) : a2 * v * v;
    }
  });
  return out;
}

ModeSamples y_derivative(const ExtensionField& field, int j, DerivPath path, Exec exec) {
  if (j < 0) throw DomainError("y_derivative: negative order");
  const RhoGrid& g = field.grid();
  ModeSamples out;
  out.grid = field.grid_ptr();
  if (path == DerivPath::finite_difference) {
    if (j != 1 && j != 2) throw DomainError("y_derivative: finite-difference path supports orders 1 and 2");
    check_ladder_density(field.y());
    const auto idx = fd_nodes(field.y(), out.warnings);
    for (std::size_t k : idx) out.y.push_back(field.y()[k]);
    out.values = fill_rows(exec, g.size(), idx.size(), [&](std::size_t i, double* row) {
      for (std::size_t k = 0; k < idx.size(); ++k) row[k] = fd_value(field, i, idx[k], 0.0, g.nodes[i], false, j);
    });
    return out;
  }
  const auto uh = trace_of(field);
  const ModeExpr d = ModeExpr::multiplier(field.alpha()).derivative(j);
  const bool has_zero = std::find(field.y().begin(), field.y().end(), 0.0) != field.y().end();
  double at_zero = 0.0;
  if (has_zero && j % 2 == 0) {
    if (!(j < 2.0 * field.alpha()))
      throw DomainError("y_derivative: order " + std::to_string(j) + " too high for the analytic path at y = 0");
    at_zero = d.eval(0.0);
  }
  out.y = field.y();
  out.values = fill_rows(exec, g.size(), out.y.size(), [&](std::size_t i, double* row) {
    const double rho = g.nodes[i];
    const double scale = std::pow(rho, j) * uh[i];
    for (std::size_t k = 0; k < out.y.size(); ++k) {
      const double y = out.y[k];
      row[k] = scale * (y == 0.0 ? at_zero : d.eval(y * rho));
    }
  });
  return out;
}

}  // namespace polyext
