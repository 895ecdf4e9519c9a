#include "polyext/poly_exp.hpp"

#include <cmath>
#include <sstream>

#include "polyext/specfun.hpp"

namespace polyext {

PolyExp PolyExp::gaussian(double lambda, double mu) { return monomial(1.0, 0, 0, lambda, mu); }

PolyExp PolyExp::monomial(double coef, int i, int j, double lambda, double mu) {
  PolyExp f(lambda, mu);
  f.add(i, j, coef);
  return f;
}

void PolyExp::add(int i, int j, double c) {
  if (c == 0.0) return;
  if (i < 0 || j < 0) throw DomainError("PolyExp: negative exponent");
  auto& slot = coef_[{i, j}];
  slot += c;
  if (slot == 0.0) coef_.erase({i, j});
}

PolyExp& PolyExp::operator+=(const PolyExp& o) {
  if (!o.is_zero() && !is_zero() && (o.lambda_ != lambda_ || o.mu_ != mu_))
    throw DomainError("PolyExp: mismatched exponential factors");
  if (is_zero()) {
    lambda_ = o.lambda_;
    mu_ = o.mu_;
  }
  for (const auto& [key, c] : o.coef_) add(key.first, key.second, c);
  return *this;
}

PolyExp PolyExp::operator+(const PolyExp& o) const {
  PolyExp r = *this;
  r += o;
  return r;
}

PolyExp PolyExp::scaled(double c) const {
  PolyExp r(lambda_, mu_);
  for (const auto& [key, v] : coef_) r.add(key.first, key.second, c * v);
  return r;
}

PolyExp PolyExp::d_p() const {
  PolyExp r(lambda_, mu_);
  for (const auto& [key, c] : coef_) {
    const auto [i, j] = key;
    if (i > 0) r.add(i - 1, j, c * i);
    r.add(i, j, -lambda_ * c);
  }
  return r;
}

PolyExp PolyExp::d_q() const {
  PolyExp r(lambda_, mu_);
  for (const auto& [key, c] : coef_) {
    const auto [i, j] = key;
    if (j > 0) r.add(i, j - 1, c * j);
    r.add(i, j, -mu_ * c);
  }
  return r;
}

namespace {

// p * F as a PolyExp (shift in the p exponent).
PolyExp times_p(const PolyExp& f) {
  PolyExp r(f.lambda(), f.mu());
  for (const auto& [key, c] : f.coefficients()) r.add(key.first + 1, key.second, c);
  return r;
}

PolyExp times_q(const PolyExp& f) {
  PolyExp r(f.lambda(), f.mu());
  for (const auto& [key, c] : f.coefficients()) r.add(key.first, key.second + 1, c);
  return r;
}

}  // namespace

PolyExp PolyExp::laplace_x(int n) const {
  const PolyExp fp = d_p();
  PolyExp r = times_p(fp.d_p()).scaled(4.0);
  r += fp.scaled(2.0 * n);
  return r;
}

PolyExp PolyExp::delta_b(int n, double b) const {
  const PolyExp fq = d_q();
  PolyExp r = laplace_x(n);
  r += times_q(fq.d_q()).scaled(4.0);
  r += fq.scaled(2.0 * (1.0 + b));
  return r;
}

PolyExp PolyExp::delta_b_power(int n, double b, int times) const {
  PolyExp r = *this;
  for (int t = 0; t < times; ++t) r = r.delta_b(n, b);
  return r;
}

double PolyExp::at_pq(double p, double q) const {
  double s = 0.0;
  for (const auto& [key, c] : coef_) s += c * std::pow(p, key.first) * std::pow(q, key.second);
  return s * std::exp(-lambda_ * p - mu_ * q);
}

double PolyExp::operator()(double r, double y) const { return at_pq(r * r, y * y); }

double PolyExp::grad_squared(double r, double y) const {
  const double p = r * r;
  const double q = y * y;
  const double fp = d_p().at_pq(p, q);
  const double fq = d_q().at_pq(p, q);
  return 4.0 * p * fp * fp + 4.0 * q * fq * fq;
}

double PolyExp::tower_squared(int n, double b, int k, double r, double y) const {
  if (k < 0) throw DomainError("tower_squared: negative order");
  const PolyExp w = delta_b_power(n, b, k / 2);
  if (k % 2 == 0) {
    const double v = w(r, y);
    return v * v;
  }
  return w.grad_squared(r, y);
}

std::string PolyExp::describe() const {
  std::ostringstream os;
  os << "(";
  bool first = true;
  for (const auto& [key, c] : coef_) {
    if (!first) os << " + ";
    first = false;
    os << c;
    if (key.first) os << "*r^" << 2 * key.first;
    if (key.second) os << "*y^" << 2 * key.second;
  }
  if (first) os << "0";
  os << ")*exp(-" << lambda_ << "r^2-" << mu_ << "y^2)";
  return os.str();
}

}  // namespace polyext
