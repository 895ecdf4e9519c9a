#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "polyext/parallel.hpp"
#include "polyext/poly_exp.hpp"
#include "polyext/quadrature.hpp"

namespace polyext {

/// Resolution of the radial frequency quadrature.
struct RhoGridSpec {
  double rho_min = 1e-4;
  double rho_max = 40.0;
  int panels_per_decade = 8;
  int order = 12;
};

/// Quadrature in the radial frequency rho on [0, rho_max]: one Gauss panel on
/// [0, rho_min] followed by geometrically graded Gauss panels up to rho_max.
struct RhoGrid {
  int n = 0;
  double omega = 0.0;  ///< surface area of S^{n-1}
  RhoGridSpec spec;
  std::vector<double> nodes;
  std::vector<double> weights;

  static std::shared_ptr<const RhoGrid> make(int n, const RhoGridSpec& spec = {});
  std::size_t size() const { return nodes.size(); }
  /// Grid with twice the panel density.
  std::shared_ptr<const RhoGrid> refined() const;
};

using RhoGridPtr = std::shared_ptr<const RhoGrid>;

/// Geometric ladder of heights used for y -> 0 limit studies.
struct YLadder {
  std::vector<double> nodes;  ///< 0 < y_1 < ... < y_J, or a leading 0 when the sentinel is on
  double ratio = 1.0;
  bool sentinel = false;

  static YLadder geometric(double y_min = 1e-4, double y_max = 20.0, int count = 60, bool sentinel = false);
  /// y_j = y0 * 2^{-j} for j = j_first..j_last, listed in decreasing order.
  static YLadder halving(double y0, int j_first, int j_last);
};

/// Resolution of the |y|^b weighted y quadrature on [0, y_max].
struct YQuadSpec {
  double y_max = 2000.0;
  double h0 = 1e-6;
  int panels_per_decade = 8;
  int order = 12;
};

/// int_0^{y_max} y^b f(y) dy with the y^b weight absorbed into the weights.
quad::Rule y_quadrature(double b, const YQuadSpec& spec = {});

enum class FamilyKind { gaussian, poly_gaussian, slater, zero };

/// Analytic spectral profile u_hat(rho) = amplitude * rho^rho_power * base(scale * rho), with
///   gaussian: e^{-x^2/2},  poly_gaussian(j): x^{2j} e^{-x^2},  slater: e^{-x},  zero: 0.
struct SpectralFamily {
  FamilyKind kind = FamilyKind::gaussian;
  int j = 0;
  double scale = 1.0;
  double amplitude = 1.0;
  double rho_power = 0.0;

  double operator()(double rho) const;
  std::string name() const;
  static SpectralFamily parse(const std::string& name);
};

/// Samples of u_hat on a RhoGrid together with the analytic profile.
class RadialSpectralFunction {
 public:
  RadialSpectralFunction(RhoGridPtr grid, SpectralFamily family);

  const RhoGrid& grid() const { return *grid_; }
  const RhoGridPtr& grid_ptr() const { return grid_; }
  const SpectralFamily& family() const { return family_; }
  const std::vector<double>& values() const { return values_; }
  int n() const { return grid_->n; }
  double operator()(double rho) const { return family_(rho); }

 private:
  RhoGridPtr grid_;
  SpectralFamily family_;
  std::vector<double> values_;
};

RadialSpectralFunction make_test_function(const SpectralFamily& family, RhoGridPtr grid);

/// Physical radial profile u(r) of a family with rho_power = 0, under the
/// unitary transform u_hat(xi) = (2 pi)^{-n/2} int e^{-i xi.x} u dx.
std::function<double(double)> physical_profile(const SpectralFamily& family, int n);

/// u(0) = (2 pi)^{-n/2} omega_{n-1} int u_hat rho^{n-1} d rho. Throws DomainError when the
/// integrand has not decayed by the end of the grid.
double eval_physical_origin(const RadialSpectralFunction& u);

/// Per-mode extension values E_hat(rho_i, y_j), stored row-major in rho, with
/// the trace samples u_hat(rho_i) it was built from.
class ExtensionField {
 public:
  ExtensionField(RhoGridPtr grid, std::vector<double> y, double alpha, std::vector<double> values,
                 std::vector<double> trace = {}, std::optional<SpectralFamily> parent = std::nullopt);

  const RhoGrid& grid() const { return *grid_; }
  const RhoGridPtr& grid_ptr() const { return grid_; }
  const std::vector<double>& y() const { return y_; }
  double alpha() const { return alpha_; }
  int n() const { return grid_->n; }
  const std::vector<double>& values() const { return values_; }
  double at(std::size_t i, std::size_t j) const { return values_[i * y_.size() + j]; }
  const std::vector<double>& trace() const { return trace_; }
  const std::optional<SpectralFamily>& parent() const { return parent_; }

  /// Attaches y-quadrature weights (carrying |y|^b for the stated b) to the y nodes.
  void set_y_weights(std::vector<double> weights, double b);
  const std::vector<double>& y_weights() const { return y_weights_; }
  double y_weight_b() const { return y_weight_b_; }

 private:
  RhoGridPtr grid_;
  std::vector<double> y_;
  double alpha_;
  std::vector<double> values_;
  std::vector<double> trace_;
  std::optional<SpectralFamily> parent_;
  std::vector<double> y_weights_;
  double y_weight_b_ = 0.0;
};

/// Samples U(r_i, y_j), y >= 0 (even extension implied), optionally backed by
/// an exact analytic family.
class PhysicalField {
 public:
  PhysicalField(int n, std::vector<double> r, std::vector<double> y, std::vector<double> values);

  /// Samples an analytic field on the given lattice and keeps the family for exact derivatives.
  static PhysicalField from_family(int n, const PolyExp& family, std::vector<double> r, std::vector<double> y);

  int n() const { return n_; }
  const std::vector<double>& r() const { return r_; }
  const std::vector<double>& y() const { return y_; }
  const std::vector<double>& values() const { return values_; }
  double at(std::size_t i, std::size_t j) const { return values_[i * y_.size() + j]; }
  const std::optional<PolyExp>& family() const { return family_; }

 private:
  int n_;
  std::vector<double> r_;
  std::vector<double> y_;
  std::vector<double> values_;
  std::optional<PolyExp> family_;
};

// ---- weighted integration ------------------------------------------------

/// sum_i w_i rho_i^p v_i over a RhoGrid.
double integrate_rho(const RhoGrid& grid, const std::vector<double>& values, double rho_power = 0.0);
/// Same with an analytic integrand.
double integrate_rho(const RhoGrid& grid, const std::function<double(double)>& f, double rho_power = 0.0);

/// int_0^L x^beta f(x) dx with endpoint-absorbing panels.
double integrate_half_line(double beta, double length, const std::function<double(double)>& f);

/// Weight  |y|^b (r^2 + y^2)^{-q}  on R^{n+1} for x-radial, y-even integrands.
struct PhysicalWeight {
  double b = 0.0;
  double q = 0.0;
};

/// Resolution of the polar quadrature r = R cos(theta), y = R sin(theta).
struct PolarSpec {
  double r_max = 14.0;
  double h0 = 1e-5;
  int panels_per_decade = 6;
  int order = 16;
  int theta_panels = 8;
};

/// Integral over R^{n+1} (both y signs) of weight * f(r, y) for x-radial, y-even f:
///   2 omega_{n-1} int_0^inf int_0^{pi/2} R^{n+b-2q} cos^{n-1} sin^b f dtheta dR.
/// Rejects weights that are not integrable at the origin (n + 1 + b - 2q <= 0) or b <= -1.
double integrate_physical(int n, const PhysicalWeight& w, const std::function<double(double, double)>& f,
                          const PolarSpec& spec = {}, Exec exec = Exec::serial);

// ---- field files ---------------------------------------------------------

/// Malformed or truncated field file.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line);
  int line() const { return line_; }

 private:
  int line_;
};

enum class FieldKind { spectral, physical };

/// Contents of a v1 field file: a lattice x_nodes x y_nodes with row-major values.
struct FieldData {
  FieldKind kind = FieldKind::spectral;
  int n = 0;
  double alpha = 0.0;
  double b = 0.0;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> values;
};

void dump_field(const FieldData& data, const std::string& path);
void dump_field(const ExtensionField& field, double b, const std::string& path);
void dump_field(const PhysicalField& field, double alpha, double b, const std::string& path);
FieldData load_field(const std::string& path);

/// Shortest round-trip decimal of a double.
std::string format_double(double v);

}  // namespace polyext
