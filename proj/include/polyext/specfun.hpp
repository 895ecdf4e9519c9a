#pragma once

#include <stdexcept>
#include <string>

namespace polyext {

/// Raised when an argument lies outside the domain of a special function
/// or of an operator precondition.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Raised for Gamma evaluations at nonpositive integers.
class PoleError : public DomainError {
 public:
  explicit PoleError(const std::string& what) : DomainError(what) {}
};

namespace specfun {

/// Gamma function via a Lanczos approximation (g = 7, 9 terms) with the
/// reflection formula for x < 1/2. About 13-15 significant digits on |x| <= 50.
double gamma(double x);

/// log|Gamma(x)|; `sign`, when non-null, receives the sign of Gamma(x).
double log_gamma(double x, int* sign = nullptr);

/// Gamma(x) / Gamma(y) through log-Gamma differences.
double gamma_ratio(double x, double y);

/// 1/Gamma(1 + mu) for |mu| <= 1/2 from its Taylor series; exact at mu = 0.
double reciprocal_gamma_1p(double mu);

/// Modified Bessel function of the second kind K_nu(t), t > 0, any real nu
/// (K_{-nu} = K_nu). Temme series for t <= 2, Steed continued fraction above,
/// forward recurrence in the order.
double bessel_k(double nu, double t);

/// e^t K_nu(t); finite for every t > 0 where K_nu underflows.
double bessel_k_scaled(double nu, double t);

/// d/dt [t^nu K_nu(t)] = -t^nu K_{nu-1}(t).
double tk_derivative(double nu, double t);

/// Factorial as a double.
double factorial(int k);

}  // namespace specfun
}  // namespace polyext
