#pragma once

#include <string>
#include <vector>

namespace polyext {

/// Evaluation point of the kernel P^y_alpha(x), |x| = r.
struct KernelPoint {
  int n = 1;
  double alpha = 0.5;
  double r = 0.0;
  double y = 1.0;
};

/// P^y_alpha(x) = c_{n,alpha} |y|^{2 alpha} (r^2 + y^2)^{-(n + 2 alpha)/2}. Rejects y = 0.
double poisson_eval(const KernelPoint& p);

/// omega_{n-1} int_0^inf P^y_alpha(r) r^{n-1} dr, computed through r = y cot(phi).
double kernel_mass(int n, double alpha, double y = 1.0);

/// Outcome of a direct Fourier transform check of the kernel.
struct FtCheck {
  double max_residual = 0.0;  ///< max |FT - (2pi)^{-n/2} m_alpha(y rho)| / (2pi)^{-n/2}
  double max_error_estimate = 0.0;
  std::vector<double> transform;  ///< (2pi)^{n/2} * FT at each sample
};

/// Radial Fourier transform of P^y_alpha by oscillatory quadrature (n = 1: cosine
/// transform; n = 2: Hankel J_0 transform), integrating between zeros of the
/// oscillating factor and accelerating the tail with Wynn's epsilon algorithm.
/// Throws DomainError for n outside {1, 2} and when the extrapolation does not settle.
FtCheck kernel_ft_check(int n, double alpha, const std::vector<double>& rho, double y);

/// Sum of terms coef * y^a * p^i * S^{-e} with p = r^2 and S = r^2 + y^2 (y > 0).
/// Closed under d/dy, y^{-1} d/dy and the radial Laplacian in x.
class KernelExpr {
 public:
  struct Term {
    double coef;
    double a;
    int i;
    double e;
  };

  KernelExpr() = default;
  /// The kernel P_alpha itself in dimension n.
  static KernelExpr poisson(int n, double alpha);

  const std::vector<Term>& terms() const { return terms_; }
  KernelExpr& operator+=(const KernelExpr& o);
  KernelExpr operator-(const KernelExpr& o) const;
  KernelExpr scaled(double c) const;
  /// Multiplies by y^k.
  KernelExpr times_y_power(double k) const;

  KernelExpr dy() const;
  KernelExpr inv_y_dy() const;
  KernelExpr laplace_x(int n) const;
  /// Delta_b = Delta_x + d_yy + b y^{-1} d_y.
  KernelExpr delta_b(int n, double b) const;

  double eval(double r, double y) const;
  /// Sum of |terms| at the point; scale for relative residuals.
  double magnitude(double r, double y) const;

 private:
  void add(double coef, double a, int i, double e);
  std::vector<Term> terms_;
};

enum class KernelIdentity { i_dy, i_delta_b, ii, iii };

KernelIdentity parse_kernel_identity(const std::string& name);
std::string kernel_identity_name(KernelIdentity which);

/// |LHS - RHS| of the selected kernel identity at (r, y), both sides built from
/// symbolic derivatives of the closed-form kernel.
///   i_dy:      d_y P_a = 2a y^{-1}(P_a - P_{a+1})
///   i_delta_b: Delta_b P_a = 2a(b - 1 + 2a) y^{-2}(P_a - P_{a+1})
///   ii:        d_y P_a = y Delta_x P_{a-1} / (2(a-1)),  a > 1
///   iii:       Delta_b^m P_a = G Delta_x^m P_{a-m},  m < a
double r1_residual(KernelIdentity which, int n, double alpha, double b, int m, double r, double y);

/// Same residual divided by the magnitude of the left-hand side terms.
double r1_relative_residual(KernelIdentity which, int n, double alpha, double b, int m, double r, double y);

}  // namespace polyext
