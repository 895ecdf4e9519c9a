#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polyext/extension.hpp"
#include "polyext/orders.hpp"
#include "polyext/parallel.hpp"
#include "polyext/poly_exp.hpp"
#include "polyext/radial_field.hpp"

namespace polyext {

// ---- check values --------------------------------------------------------

/// How a measured value is judged.
///   absolute:  |measured - expected| <= tol
///   relative:  |measured - expected| <= tol |expected|
///   at_most:   measured <= tol (no expected value)
///   at_least:  measured >= expected (1 - tol)
enum class Compare { absolute, relative, at_most, at_least };

std::string compare_name(Compare c);

struct CheckValue {
  std::string name;
  std::vector<std::pair<std::string, std::string>> params;  ///< ordered as given
  double measured = 0.0;
  std::optional<double> expected;
  double tol = 0.0;
  Compare compare = Compare::absolute;
  bool pass = false;
  std::string note;  ///< error text or path flags, empty when none

  double abs_err() const;  ///< NaN without an expected value
  double rel_err() const;  ///< NaN without an expected value or when it is 0

  /// Recomputes `pass` from the fields; a non-finite measurement never passes.
  void judge();
};

CheckValue make_check(std::string name, std::vector<std::pair<std::string, std::string>> params, double measured,
                      std::optional<double> expected, double tol, Compare compare);

// ---- energies and seminorms ----------------------------------------------

/// omega int int rho^{n-1} |y|^b density over both y signs. The field must carry
/// y-quadrature weights for the same b (see extend_on_quadrature). Throws DomainError
/// when the rho or y tail has not decayed.
double weighted_energy(const ExtensionField& field, int k, double b, Exec exec = Exec::serial);

/// omega int rho^{n-1+2s} |u_hat|^2 d rho.
double trace_seminorm(const RadialSpectralFunction& u, double s);

struct EnergyIdentity {
  double energy = 0.0;
  double seminorm = 0.0;
  double expected = 0.0;  ///< 2 d_s seminorm
  double gap = 0.0;       ///< |energy - expected| / expected
};

EnergyIdentity energy_identity(const RadialSpectralFunction& u, const FractionalOrder& order,
                               const YQuadSpec& yspec = {}, Exec exec = Exec::serial);

double energy_identity_gap(const RadialSpectralFunction& u, const FractionalOrder& order, const YQuadSpec& yspec = {},
                           Exec exec = Exec::serial);

enum class BesselMethod { quadrature, closed_form };

/// C_alpha with energy of E_alpha[u] under the order-(1+[s]) tower = C_alpha * trace seminorm.
/// With j = (1+[s])/2 (floor) and P = prod_{i<j} (2(alpha-i)+b-1), c = 2^{1-alpha}/Gamma(alpha):
///   odd 1+[s]:  2 (cP)^2 int t^{b+2(alpha-j)} (K_{alpha-j}^2 + K_{alpha-j-1}^2) dt
///   even 1+[s]: 2 (cP)^2 int t^{b+2(alpha-j)} K_{alpha-j}^2 dt
/// `quadrature` integrates the Bessel products, `closed_form` uses the Gamma formula for
///   int t^{mu-1} K_nu^2 = sqrt(pi) Gamma(mu/2+nu) Gamma(mu/2-nu) Gamma(mu/2) / (4 Gamma(mu/2+1/2)).
/// n only enters through the admissibility of s. Throws DomainError when an integral diverges.
double walphasumm_constant(double alpha, double s, int n, BesselMethod method = BesselMethod::quadrature);

/// Profile energy 2 int_0^inf t^b (phi'^2 + phi^2) at phi = m_{(1-b)/2}: an upper bound on the
/// trace constant c_b, reported next to 2 d_{(1-b)/2}.
struct TraceConstantReport {
  double b = 0.0;
  double profile_energy = 0.0;
  double two_d = 0.0;
};

TraceConstantReport trace_constant_profile(double b);

// ---- limits at the trace hyperplane --------------------------------------

/// omega int rho^{n-1+2s} |u_hat|^2 Phi_sigma(y rho)^2 d rho (Neumann deficit).
double dtn_residual_norm(const RadialSpectralFunction& u, const FractionalOrder& order, double y);

enum class AxisPath { spectral, physical };

AxisPath parse_axis_path(const std::string& name);

/// (-Delta)^m u(0) = omega (2 pi)^{-n/2} int rho^{n-1+2m} u_hat d rho.
double laplacian_moment(const RadialSpectralFunction& u, int m);

/// E(0,y) - sum_{m<=[s]} kappa_{s,m} y^{2m} (-Delta)^m u(0) / (2m)!.
double taylor_remainder(const RadialSpectralFunction& u, const FractionalOrder& order, double y,
                        AxisPath path = AxisPath::spectral);

/// Relative gap between (-Delta_b)^m E at height y and (d_s/d_{s-m}) rho^{2m} u_hat, in the
/// rho^{2(s-2m)}-weighted spectral L^2 norm.
double limits_gap(const RadialSpectralFunction& u, const FractionalOrder& order, int m, double y,
                  Exec exec = Exec::serial);

/// Per-mode sup over the grid of the relative residual of
///   (-Delta_b)^m E = -2(1+[s]-m) y^{-1} d_y (-Delta_b)^{m-1} E,
/// with the left side from the operator algebra and the right side from Bessel values.
double recursion_residual(const RadialSpectralFunction& u, const FractionalOrder& order, int m, double y);

/// m-th Taylor derivative of m_s at 0 by centred differences with Richardson elimination
/// of the known error exponents {2, 4, ...} and {2s-2m, 2s-2m+2, ...}.
double kappa_fd(double s, int m);

// ---- Hardy quotients -----------------------------------------------------

struct HardyQuotient {
  double numerator = 0.0;
  double denominator = 0.0;
  double quotient = 0.0;
  double bound = 0.0;  ///< H_{k,a,b}^2
  bool finite_difference = false;
};

/// [int |y|^b |z|^{-2a} |grad Delta_b^k U|^2] / [int |y|^b |z|^{-2(a+k)} |U|^2]. Exact tower
/// derivatives when U carries its analytic family, otherwise three-point stencils on the
/// lattice (flagged). Throws DomainError for inadmissible parameters or non-decaying U.
HardyQuotient hardy_quotient(const PhysicalField& U, const HardyParams& p, const PolarSpec& spec = {},
                             Exec exec = Exec::serial);

// ---- integration by parts ------------------------------------------------

enum class IbpCheck { step1, orthogonality, normal_flux };

IbpCheck parse_ibp_check(const std::string& name);

/// Relative residual of  int |y|^b (-Delta_b)^{k-1} W (-Delta_b) V = int |y|^b grad Delta_b^k W . grad Delta_b^k V.
double ibp_step1(const PolyExp& W, const PolyExp& V, int n, int k, double b, const PolarSpec& spec = {},
                 Exec exec = Exec::serial);

/// |int |y|^b grad Delta_b^{1+[s]} E . grad Delta_b^{1+[s]} V| / sqrt(energy(E) energy(V)) for a V of
/// the form e^{-lambda r^2} h(y) with V(x, 0) = 0, computed mode by mode.
double ibp_orthogonality(const RadialSpectralFunction& u, const FractionalOrder& order, const PolyExp& V,
                         const YQuadSpec& yspec = {}, Exec exec = Exec::serial);

/// max_i |y^b d_y Delta_b^{m-1} E(rho_i, y)| / max_i |rho_i^{2m-1-b} u_hat_i|; needs 1 <= m <= (1+[s])/2.
double normal_flux(const RadialSpectralFunction& u, const FractionalOrder& order, int m, double y);

// ---- boundedness ---------------------------------------------------------

/// E_alpha[u](r, y) by the radial Hankel inversion of u_hat m_alpha(y rho).
class PhysicalExtension {
 public:
  PhysicalExtension(const SpectralFamily& family, int n, double alpha, double rho_cut = 12.0);
  double operator()(double r, double y) const;
  const std::vector<double>& nodes() const { return rho_; }
  const std::vector<double>& weights() const { return w_; }

 private:
  int n_;
  double alpha_;
  std::vector<double> rho_, w_;  ///< weights carry u_hat rho^{n-1}
};

struct BoundednessRatio {
  double alpha = 0.0;
  double numerator = 0.0;    ///< int |y|^b |z|^{-2(1+[s])} |E_alpha u|^2
  double denominator = 0.0;  ///< int |x|^{-2s} |u|^2
  double ratio = 0.0;
};

/// Product quadrature in (r, y) on [0, z_max]^2 for the boundedness ratio.
struct BoundednessSpec {
  double z_max = 20.0;
  double h0 = 1e-5;
  int panels_per_decade = 4;
  int order = 10;
  double rho_cut = 12.0;  ///< u_hat is treated as zero beyond this frequency
};

/// Ratios for the distinct alpha in {sigma, sigma+1, s, s+1}.
std::vector<BoundednessRatio> boundedness_ratios(const SpectralFamily& family, const FractionalOrder& order,
                                                 const BoundednessSpec& spec = {}, Exec exec = Exec::serial);

// ---- covariance ----------------------------------------------------------

struct ScalingExponents {
  double seminorm = 0.0;
  double energy = 0.0;
  double expected = 0.0;  ///< n - 2s
};

/// Exponents of lambda measured from u_hat -> lambda^n u_hat(lambda rho).
ScalingExponents scaling_exponents(const RadialSpectralFunction& u, const FractionalOrder& order, double lambda,
                                   const YQuadSpec& yspec = {}, Exec exec = Exec::serial);

}  // namespace polyext
