#include "polyext/radial_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "polyext/orders.hpp"
#include "polyext/specfun.hpp"

namespace polyext {

// ---- grids ---------------------------------------------------------------

namespace {

RhoGridPtr build_rho_grid(int n, const RhoGridSpec& spec) {
  if (n < 1) throw DomainError("RhoGrid: n must be >= 1");
  if (!(spec.rho_min > 0.0 && spec.rho_max > spec.rho_min)) throw DomainError("RhoGrid: need 0 < rho_min < rho_max");
  auto g = std::make_shared<RhoGrid>();
  g->n = n;
  g->omega = sphere_area(n);
  g->spec = spec;
  quad::Rule r = quad::gauss_legendre(spec.order, 0.0, spec.rho_min);
  const int panels =
      std::max(1, static_cast<int>(std::ceil(std::log10(spec.rho_max / spec.rho_min) * spec.panels_per_decade)));
  r.append(quad::composite(quad::geometric_edges(spec.rho_min, spec.rho_max, panels), spec.order));
  g->nodes = std::move(r.nodes);
  g->weights = std::move(r.weights);
  return g;
}

}  // namespace

RhoGridPtr RhoGrid::make(int n, const RhoGridSpec& spec) { return build_rho_grid(n, spec); }

RhoGridPtr RhoGrid::refined() const {
  RhoGridSpec s = spec;
  s.panels_per_decade *= 2;
  return build_rho_grid(n, s);
}

YLadder YLadder::geometric(double y_min, double y_max, int count, bool sentinel) {
  if (!(y_min > 0.0 && y_max > y_min) || count < 2) throw DomainError("YLadder: need 0 < y_min < y_max, count >= 2");
  YLadder l;
  l.ratio = std::pow(y_max / y_min, 1.0 / (count - 1));
  l.sentinel = sentinel;
  if (sentinel) l.nodes.push_back(0.0);
  for (int j = 0; j < count; ++j) l.nodes.push_back(y_min * std::pow(l.ratio, j));
  l.nodes.back() = y_max;
  return l;
}

YLadder YLadder::halving(double y0, int j_first, int j_last) {
  if (!(y0 > 0.0) || j_last < j_first) throw DomainError("YLadder::halving: bad range");
  YLadder l;
  l.ratio = 0.5;
  for (int j = j_first; j <= j_last; ++j) l.nodes.push_back(std::ldexp(y0, -j));
  return l;
}

quad::Rule y_quadrature(double b, const YQuadSpec& spec) {
  return quad::power_endpoint(b, spec.y_max, spec.h0, spec.panels_per_decade, spec.order);
}

// ---- spectral families ---------------------------------------------------

double SpectralFamily::operator()(double rho) const {
  const double x = scale * rho;
  double base = 0.0;
  switch (kind) {
    case FamilyKind::gaussian: base = std::exp(-0.5 * x * x); break;
    case FamilyKind::poly_gaussian: base = std::pow(x, 2 * j) * std::exp(-x * x); break;
    case FamilyKind::slater: base = std::exp(-x); break;
    case FamilyKind::zero: return 0.0;
  }
  if (rho_power != 0.0) base *= std::pow(rho, rho_power);
  return amplitude * base;
}

std::string SpectralFamily::name() const {
  switch (kind) {
    case FamilyKind::gaussian: return "gaussian";
    case FamilyKind::poly_gaussian: return "poly_gaussian(" + std::to_string(j) + ")";
    case FamilyKind::slater: return "slater";
    case FamilyKind::zero: return "zero";
  }
  return "unknown";
}

SpectralFamily SpectralFamily::parse(const std::string& name) {
  SpectralFamily f;
  if (name == "gaussian") {
    f.kind = FamilyKind::gaussian;
  } else if (name == "slater") {
    f.kind = FamilyKind::slater;
  } else if (name == "zero") {
    f.kind = FamilyKind::zero;
  } else if (name.rfind("poly_gaussian", 0) == 0) {
    f.kind = FamilyKind::poly_gaussian;
    f.j = 1;
    const auto open = name.find('(');
    if (open != std::string::npos) {
      const auto close = name.find(')', open);
      if (close == std::string::npos) throw DomainError("unknown family: " + name);
      try {
        f.j = std::stoi(name.substr(open + 1, close - open - 1));
      } catch (const std::exception&) {
        throw DomainError("unknown family: " + name);
      }
    } else if (name != "poly_gaussian") {
      throw DomainError("unknown family: " + name);
    }
    if (f.j < 0) throw DomainError("poly_gaussian: j must be >= 0");
  } else {
    throw DomainError("unknown family: " + name);
  }
  return f;
}

RadialSpectralFunction::RadialSpectralFunction(RhoGridPtr grid, SpectralFamily family)
    : grid_(std::move(grid)), family_(family) {
  if (!grid_) throw DomainError("RadialSpectralFunction: null grid");
  values_.resize(grid_->size());
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] = family_(grid_->nodes[i]);
}

RadialSpectralFunction make_test_function(const SpectralFamily& family, RhoGridPtr grid) {
  return RadialSpectralFunction(std::move(grid), family);
}

std::function<double(double)> physical_profile(const SpectralFamily& family, int n) {
  if (family.rho_power != 0.0) throw DomainError("physical_profile: rho_power must be 0");
  const double s = family.scale;
  const double amp = family.amplitude * std::pow(s, -n);
  switch (family.kind) {
    case FamilyKind::zero: return [](double) { return 0.0; };
    case FamilyKind::gaussian:
      return [amp, s](double r) { return amp * std::exp(-0.5 * r * r / (s * s)); };
    case FamilyKind::slater: {
      const double c = amp * std::pow(2.0 * std::numbers::pi, 0.5 * n) * poisson_normalizer(n, 0.5);
      return [c, s, n](double r) {
        const double x = r / s;
        return c * std::pow(1.0 + x * x, -0.5 * (n + 1));
      };
    }
    case FamilyKind::poly_gaussian: {
      // e^{-rho^2} <-> 2^{-n/2} e^{-r^2/4};  rho^{2j} <-> (-Delta)^j
      PolyExp f = PolyExp::monomial(std::pow(2.0, -0.5 * n), 0, 0, 0.25, 0.0);
      for (int t = 0; t < family.j; ++t) f = f.laplace_x(n).scaled(-1.0);
      return [f, amp, s](double r) { return amp * f(r / s, 0.0); };
    }
  }
  throw DomainError("physical_profile: unknown family");
}

double eval_physical_origin(const RadialSpectralFunction& u) {
  const RhoGrid& g = u.grid();
  const double p = g.n - 1.0;
  const double total = integrate_rho(g, u.values(), p);
  const double last = std::abs(u.values().back()) * std::pow(g.nodes.back(), g.n);
  if (last > 1e-10 * std::max(std::abs(total), 1e-300) && last > 1e-300)
    throw DomainError("eval_physical_origin: integrand not decayed at rho_max (tail-dominated)");
  return std::pow(2.0 * std::numbers::pi, -0.5 * g.n) * g.omega * total;
}

// ---- fields --------------------------------------------------------------

ExtensionField::ExtensionField(RhoGridPtr grid, std::vector<double> y, double alpha, std::vector<double> values,
                               std::vector<double> trace, std::optional<SpectralFamily> parent)
    : grid_(std::move(grid)),
      y_(std::move(y)),
      alpha_(alpha),
      values_(std::move(values)),
      trace_(std::move(trace)),
      parent_(parent) {
  if (!grid_) throw DomainError("ExtensionField: null grid");
  if (values_.size() != grid_->size() * y_.size()) throw DomainError("ExtensionField: value count mismatch");
  if (!trace_.empty() && trace_.size() != grid_->size()) throw DomainError("ExtensionField: trace size mismatch");
}

void ExtensionField::set_y_weights(std::vector<double> weights, double b) {
  if (weights.size() != y_.size()) throw DomainError("ExtensionField: y weight count mismatch");
  y_weights_ = std::move(weights);
  y_weight_b_ = b;
}

PhysicalField::PhysicalField(int n, std::vector<double> r, std::vector<double> y, std::vector<double> values)
    : n_(n), r_(std::move(r)), y_(std::move(y)), values_(std::move(values)) {
  if (values_.size() != r_.size() * y_.size()) throw DomainError("PhysicalField: value count mismatch");
  for (double v : y_)
    if (v < 0.0) throw DomainError("PhysicalField: only y >= 0 is stored (even extension)");
}

PhysicalField PhysicalField::from_family(int n, const PolyExp& family, std::vector<double> r, std::vector<double> y) {
  std::vector<double> v;
  v.reserve(r.size() * y.size());
  for (double ri : r)
    for (double yj : y) v.push_back(family(ri, yj));
  PhysicalField f(n, std::move(r), std::move(y), std::move(v));
  f.family_ = family;
  return f;
}

// ---- integration ---------------------------------------------------------

double integrate_rho(const RhoGrid& grid, const std::vector<double>& values, double rho_power) {
  if (values.size() != grid.size()) throw DomainError("integrate_rho: sample count mismatch");
  std::vector<double> terms(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = rho_power == 0.0 ? grid.weights[i] : grid.weights[i] * std::pow(grid.nodes[i], rho_power);
    terms[i] = w * values[i];
  }
  return pairwise_sum(terms);
}

double integrate_rho(const RhoGrid& grid, const std::function<double(double)>& f, double rho_power) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.nodes[i]);
  return integrate_rho(grid, v, rho_power);
}

double integrate_half_line(double beta, double length, const std::function<double(double)>& f) {
  const double h0 = std::min(1e-4, 0.5 * length);
  const auto rule = quad::power_endpoint_graded(beta, length, h0, std::min(length, 4.0), 0.5, 6, 14);
  return rule.apply(f);
}

double integrate_physical(int n, const PhysicalWeight& w, const std::function<double(double, double)>& f,
                          const PolarSpec& spec, Exec exec) {
  if (n < 1) throw DomainError("integrate_physical: n must be >= 1");
  if (!(w.b > -1.0 && w.b < 1.0)) throw DomainError("integrate_physical: need -1 < b < 1");
  const double radial_power = n + w.b - 2.0 * w.q;
  if (!(radial_power > -1.0))
    throw DomainError("integrate_physical: weight |y|^b |z|^{-2q} not integrable at the origin (n+1+b <= 2q)");
  const quad::Rule rr = quad::power_endpoint(radial_power, spec.r_max, spec.h0, spec.panels_per_decade, spec.order);
  const double half_pi = 0.5 * std::numbers::pi;
  quad::Rule th = quad::power_endpoint_graded(w.b, half_pi, 1e-6, 0.2, half_pi / spec.theta_panels, 4, spec.order);
  // sin^b = theta^b (sin/theta)^b; theta^b is already in the weights.
  std::vector<double> cs(th.size()), sn(th.size());
  for (std::size_t k = 0; k < th.size(); ++k) {
    const double t = th.nodes[k];
    cs[k] = std::cos(t);
    sn[k] = std::sin(t);
    th.weights[k] *= std::pow(cs[k], n - 1) * (w.b == 0.0 ? 1.0 : std::pow(sn[k] / t, w.b));
  }
  const double total = sum_rows(exec, rr.size(), [&](std::size_t i) {
    const double R = rr.nodes[i];
    double row = 0.0;
    for (std::size_t k = 0; k < th.size(); ++k) row += th.weights[k] * f(R * cs[k], R * sn[k]);
    return rr.weights[i] * row;
  });
  return 2.0 * sphere_area(n) * total;
}

}  // namespace polyext
