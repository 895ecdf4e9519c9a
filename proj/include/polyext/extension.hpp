#pragma once

#include <functional>
#include <string>
#include <vector>

#include "polyext/parallel.hpp"
#include "polyext/radial_field.hpp"

namespace polyext {

/// Per-mode profile in t = y rho, written in the basis f_mu(t) = t^mu K_mu(t):
///   sum_k coef_k t^{q_k} f_{mu_k}(t).
/// The basis is closed under d/dt (f_mu' = -t f_{mu-1}) and the recurrence
/// t^2 f_{mu-2} = f_mu - 2(mu-1) f_{mu-1} keeps q in {..., 0, 1}, so that
/// L_b = d_tt + b t^{-1} d_t - 1 maps c f_mu to -(2mu + b - 1) c f_{mu-1} exactly.
class ModeExpr {
 public:
  struct Term {
    double coef;
    int q;
    double mu;
  };

  ModeExpr() = default;
  /// m_alpha(t) = 2^{1-alpha}/Gamma(alpha) f_alpha(t).
  static ModeExpr multiplier(double alpha);
  static ModeExpr basis(double coef, int q, double mu);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  ModeExpr& operator+=(const ModeExpr& o);
  ModeExpr scaled(double c) const;
  ModeExpr times_t(int k) const;

  ModeExpr derivative() const;
  ModeExpr derivative(int j) const;
  /// t^{-1} d/dt.
  ModeExpr inv_t_derivative() const;
  /// L_b = d_tt + b t^{-1} d_t - 1, the per-mode form of Delta_b at unit frequency.
  ModeExpr delta_b(double b) const;

  /// Value at t > 0; at t = 0 the limit, or DomainError when a term diverges.
  double eval(double t) const;

 private:
  void add(double coef, int q, double mu);
  void reduce();
  std::vector<Term> terms_;
};

/// Callable per-mode extension profile g(y) = m_alpha(y rho) with analytic derivatives.
struct ModeProfile {
  double alpha;
  double rho;

  double value(double y) const;
  double d1(double y) const;
  double d2(double y) const;
};

enum class DerivPath { analytic, finite_difference };

DerivPath parse_deriv_path(const std::string& name);

/// Per-mode samples on a rho grid x y lattice, row-major in rho.
struct ModeSamples {
  RhoGridPtr grid;
  std::vector<double> y;
  std::vector<double> values;
  std::vector<std::string> warnings;

  double at(std::size_t i, std::size_t j) const { return values[i * y.size() + j]; }
};

/// E_hat(rho, y) = u_hat(rho) m_alpha(y rho) on the given heights.
ExtensionField extend(const RadialSpectralFunction& u, double alpha, const std::vector<double>& y,
                      Exec exec = Exec::serial);
ExtensionField extend(const RadialSpectralFunction& u, double alpha, const YLadder& ladder, Exec exec = Exec::serial);

/// Extension sampled on the nodes of the |y|^b weighted y quadrature (weights attached).
ExtensionField extend_on_quadrature(const RadialSpectralFunction& u, double alpha, double b,
                                    const YQuadSpec& spec = {}, Exec exec = Exec::serial);

/// E_alpha[u](0, y) from the spectral side: (2pi)^{-n/2} omega int u_hat m_alpha(y rho) rho^{n-1} d rho.
double axis_value_spectral(const RadialSpectralFunction& u, double alpha, double y);

/// E_alpha[u](0, y) = c_{n,alpha} omega int_0^inf u(r) y^{2alpha} r^{n-1} (r^2+y^2)^{-(n+2alpha)/2} dr
/// by direct quadrature of the physical profile (r = y cot(phi)).
double extend_axis_oracle(const std::function<double(double)>& u, int n, double alpha, double y);

/// Multiplier rho^exponent applied to u_hat; exponent = 2s gives (-Delta)^s.
RadialSpectralFunction frac_laplacian(const RadialSpectralFunction& u, double exponent);

/// Per-mode Delta_b^power E. Analytic path: rho^{2 power} u_hat (L_b^power m_alpha)(y rho), with the
/// even limit Delta_b = -rho^2 + (1+b) d_yy at y = 0. Finite-difference path (power 1 only):
/// three-point stencils on the field's own y nodes; a y = 0 sentinel is handled by even
/// reflection, end nodes are dropped and reported in `warnings`.
ModeSamples delta_b_apply(const ExtensionField& field, double b, DerivPath path, int power = 1,
                          Exec exec = Exec::serial);

/// Density of |grad Delta_b^k| squared per mode: even k gives |Delta_b^{k/2} E|^2, odd k gives
/// rho^2 |w|^2 + |d_y w|^2 with w = Delta_b^{(k-1)/2} E.
ModeSamples polyharm_energy_density(const ExtensionField& field, int k, double b, Exec exec = Exec::serial);

/// Per-mode d_y^j E. Analytic: rho^j u_hat m_alpha^{(j)}(y rho); at y = 0 odd orders vanish by
/// evenness and even orders need j < 2 alpha. Finite-difference path supports j in {1, 2}.
ModeSamples y_derivative(const ExtensionField& field, int j, DerivPath path, Exec exec = Exec::serial);

/// Analytic per-mode profile L_b^power m_alpha (unit frequency).
ModeExpr delta_b_tower(double alpha, double b, int power);

}  // namespace polyext
