#pragma once

#include <string>

namespace polyext {

/// Validated fractional order s in (0, n/2), s not an integer.
struct FractionalOrder {
  int n = 0;           ///< ambient trace dimension
  double s = 0.0;      ///< fractional order
  int int_part = 0;    ///< [s]
  double frac = 0.0;   ///< sigma = s - [s], in (0, 1)
  double b = 0.0;      ///< weight exponent 1 - 2 sigma, in (-1, 1)

  /// Order of the weighted operator tower, 1 + [s].
  int extension_order() const { return 1 + int_part; }
};

/// Parameters of the weighted Hardy inequality; admissible iff
/// -1 < b < 1 and 0 <= a < (n + 1 + b)/2 - k.
struct HardyParams {
  int n = 0;
  int k = 1;
  double a = 0.0;
  double b = 0.0;

  bool admissible() const;
  std::string describe() const;
};

enum class DeficitKind { neumann, dirichlet };

FractionalOrder make_order(int n, double s);

/// d_s = ([s]!/Gamma(s)) * 2 Gamma(1 - sigma) / 2^{2 sigma}. Independent of n.
double d_constant(double s);

/// Taylor coefficient kappa_{s,m} of the extension at the trace hyperplane.
double kappa(double s, int m);

/// c_{n,alpha} = Gamma((n + 2 alpha)/2) / (pi^{n/2} Gamma(alpha)).
double poisson_normalizer(int n, double alpha);

/// Constant H_{k,a,b} of the weighted Hardy inequality.
double hardy_constant(const HardyParams& p);

/// Fourier profile of the unit-height kernel,
/// m_alpha(t) = 2^{1-alpha}/Gamma(alpha) t^alpha K_alpha(t), m_alpha(0) = 1.
double multiplier(double alpha, double t);

/// Derivative m_alpha'(t) = -2^{1-alpha}/Gamma(alpha) t^alpha K_{alpha-1}(t).
double multiplier_derivative(double alpha, double t);

/// Dirichlet-to-Neumann deficit Phi_alpha(t).
///   neumann:   1 - 2^alpha/Gamma(1-alpha) t^{1-alpha} K_{1-alpha}(t), alpha in (0,1)
///   dirichlet: 1 - m_alpha(t)
double dtn_deficit(double alpha, double t, DeficitKind kind);

/// Surface measure of the unit sphere S^{n-1}, 2 pi^{n/2} / Gamma(n/2).
double sphere_area(int n);

}  // namespace polyext
