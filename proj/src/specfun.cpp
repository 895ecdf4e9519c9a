#include "polyext/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace polyext::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Lanczos coefficients, g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

// Coefficients c_k of 1/Gamma(z) = sum_k c_k z^k (Abramowitz & Stegun 6.1.34).
constexpr std::array<double, 26> kRecipGamma = {
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
    -0.0000012504934821,
    0.0000011330272320,
    -0.0000002056338417,
    0.0000000061160950,
    0.0000000050020075,
    -0.0000000011812746,
    0.0000000001043427,
    0.0000000000077823,
    -0.0000000000036968,
    0.0000000000005100,
    -0.0000000000000206,
    -0.0000000000000054,
    0.0000000000000014,
    0.0000000000000001};

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

double lanczos_sum(double z) {
  // z = x - 1
  double a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (z + static_cast<double>(i));
  return a;
}

// sin(pi x) with exact zeros at the integers and argument reduction.
double sin_pi(double x) {
  double r = std::fmod(x, 2.0);
  if (r < 0) r += 2.0;
  if (r == 0.0 || r == 1.0) return 0.0;
  if (r == 0.5) return 1.0;
  if (r == 1.5) return -1.0;
  return std::sin(kPi * r);
}

// 1/Gamma(1-mu) and the Temme auxiliaries gam1, gam2 for |mu| <= 1/2.
struct TemmeGammas {
  double gam1;   // (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)
  double gam2;   // (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2
  double gampl;  // 1/Gamma(1+mu)
  double gammi;  // 1/Gamma(1-mu)
};

TemmeGammas temme_gammas(double mu) {
  // 1/Gamma(1+x) = sum_k c_k x^{k-1}; split into even/odd powers of mu.
  double even = 0.0;  // sum over odd k (even powers)
  double odd = 0.0;   // sum over even k, divided by mu
  double mu2 = mu * mu;
  double p = 1.0;
  for (std::size_t k = 0; k < kRecipGamma.size(); k += 2) {
    even += kRecipGamma[k] * p;
    if (k + 1 < kRecipGamma.size()) odd += kRecipGamma[k + 1] * p;
    p *= mu2;
  }
  TemmeGammas g{};
  g.gam2 = even;
  g.gam1 = -odd;
  g.gampl = even + mu * odd;
  g.gammi = even - mu * odd;
  return g;
}

// K_mu(x) and K_{mu+1}(x) for |mu| <= 1/2, optionally scaled by e^x.
void temme_pair(double mu, double x, bool scaled, double& kmu, double& kmu1) {
  constexpr int kMaxIter = 10000;
  if (x <= 2.0) {
    const double x2 = 0.5 * x;
    const double pimu = kPi * mu;
    const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = mu * d;
    const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    const TemmeGammas g = temme_gammas(mu);
    double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / g.gampl;
    double q = 0.5 / (e * g.gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    int i = 1;
    for (; i <= kMaxIter; ++i) {
      const double di = static_cast<double>(i);
      ff = (di * ff + p + q) / (di * di - mu * mu);
      c *= d / di;
      p /= di - mu;
      q /= di + mu;
      const double del = c * ff;
      sum += del;
      const double del1 = c * (p - di * ff);
      sum1 += del1;
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    if (i > kMaxIter) throw DomainError("bessel_k: series did not converge");
    kmu = sum;
    kmu1 = sum1 * (2.0 / x);
    if (scaled) {
      const double ex = std::exp(x);
      kmu *= ex;
      kmu1 *= ex;
    }
    return;
  }
  // Steed's algorithm for the second continued fraction.
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu * mu;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 2;
  for (; i <= kMaxIter; ++i) {
    const double di = static_cast<double>(i);
    a -= 2.0 * (di - 1.0);
    c = -a * c / di;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  if (i > kMaxIter) throw DomainError("bessel_k: continued fraction did not converge");
  kmu = std::sqrt(kPi / (2.0 * x)) / s;
  if (!scaled) kmu *= std::exp(-x);
  kmu1 = kmu * (mu + x + 0.5 - a1 * h) / x;
}

double bessel_k_impl(double nu, double t, bool scaled) {
  if (!(t > 0.0)) throw DomainError("bessel_k: argument must be positive");
  if (!std::isfinite(nu)) throw DomainError("bessel_k: order must be finite");
  nu = std::abs(nu);
  const int n = static_cast<int>(std::floor(nu + 0.5));
  const double mu = nu - static_cast<double>(n);
  double kmu = 0.0;
  double kmu1 = 0.0;
  temme_pair(mu, t, scaled, kmu, kmu1);
  const double xi2 = 2.0 / t;
  for (int i = 1; i <= n; ++i) {
    const double next = (mu + static_cast<double>(i)) * xi2 * kmu1 + kmu;
    kmu = kmu1;
    kmu1 = next;
  }
  return kmu;
}

}  // namespace

double reciprocal_gamma_1p(double mu) { return temme_gammas(mu).gampl; }

double gamma(double x) {
  if (std::isnan(x)) return x;
  if (is_nonpositive_integer(x)) throw PoleError("gamma: pole at nonpositive integer");
  if (x < 0.5) {
    // Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return kPi / (sin_pi(x) * gamma(1.0 - x));
  }
  if (x == std::floor(x) && x <= 21.0) return factorial(static_cast<int>(x) - 1);
  const double z = x - 1.0;
  const double t = z + kLanczosG + 0.5;
  // Split the power to delay overflow.
  const double half = std::pow(t, 0.5 * (z + 0.5));
  return std::sqrt(2.0 * kPi) * half * (half * std::exp(-t)) * lanczos_sum(z);
}

double log_gamma(double x, int* sign) {
  if (std::isnan(x)) return x;
  if (is_nonpositive_integer(x)) throw PoleError("log_gamma: pole at nonpositive integer");
  if (x < 0.5) {
    const double s = sin_pi(x);
    int inner = 1;
    const double lg = log_gamma(1.0 - x, &inner);
    if (sign) *sign = (s > 0 ? 1 : -1) * inner;
    return std::log(kPi / std::abs(s)) - lg;
  }
  if (sign) *sign = 1;
  const double z = x - 1.0;
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(lanczos_sum(z));
}

double gamma_ratio(double x, double y) {
  if (is_nonpositive_integer(x) || is_nonpositive_integer(y))
    throw PoleError("gamma_ratio: pole at nonpositive integer");
  if (x == y) return 1.0;
  // Direct quotient is both cheaper and more accurate in the moderate range.
  if (std::abs(x) <= 20.0 && std::abs(y) <= 20.0) return gamma(x) / gamma(y);
  int sx = 1;
  int sy = 1;
  const double lx = log_gamma(x, &sx);
  const double ly = log_gamma(y, &sy);
  return static_cast<double>(sx * sy) * std::exp(lx - ly);
}

double bessel_k(double nu, double t) { return bessel_k_impl(nu, t, false); }

double bessel_k_scaled(double nu, double t) { return bessel_k_impl(nu, t, true); }

double tk_derivative(double nu, double t) {
  if (!(t > 0.0)) throw DomainError("tk_derivative: argument must be positive");
  // t^nu K_{nu-1}(t) in log form to survive large t
  const double log_mag = nu * std::log(t) - t + std::log(bessel_k_scaled(nu - 1.0, t));
  return -std::exp(log_mag);
}

double factorial(int k) {
  if (k < 0) throw DomainError("factorial: negative argument");
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= static_cast<double>(i);
  return f;
}

}  // namespace polyext::specfun
