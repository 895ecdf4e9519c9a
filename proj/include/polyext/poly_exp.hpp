#pragma once

#include <map>
#include <string>
#include <utility>

namespace polyext {

/// Analytic x-radial, y-even field
///   F(r, y) = sum_{i,j} c_ij p^i q^j exp(-lambda p - mu q),  p = r^2, q = y^2.
/// The class is closed under d/dp, d/dq, so every operator of the weighted
/// tower acts exactly:
///   Delta_b = 4p d_pp + 2n d_p + 4q d_qq + 2(1+b) d_q,
///   |grad F|^2 = 4p F_p^2 + 4q F_q^2.
class PolyExp {
 public:
  using Key = std::pair<int, int>;

  PolyExp() = default;
  PolyExp(double lambda, double mu) : lambda_(lambda), mu_(mu) {}

  static PolyExp gaussian(double lambda, double mu);
  static PolyExp monomial(double coef, int i, int j, double lambda, double mu);

  double lambda() const { return lambda_; }
  double mu() const { return mu_; }
  const std::map<Key, double>& coefficients() const { return coef_; }
  bool is_zero() const { return coef_.empty(); }

  void add(int i, int j, double c);
  PolyExp& operator+=(const PolyExp& o);
  PolyExp operator+(const PolyExp& o) const;
  PolyExp scaled(double c) const;

  PolyExp d_p() const;
  PolyExp d_q() const;

  /// Weighted operator Delta_b in n trace dimensions.
  PolyExp delta_b(int n, double b) const;
  /// Delta_b applied `times` times.
  PolyExp delta_b_power(int n, double b, int times) const;
  /// x-Laplacian only (radial, n dimensions).
  PolyExp laplace_x(int n) const;

  double operator()(double r, double y) const;
  /// Value at (p, q) = (r^2, y^2).
  double at_pq(double p, double q) const;
  /// |grad F|^2 at (r, y).
  double grad_squared(double r, double y) const;

  /// |grad Delta_b^{k/2} F|^2 or |Delta_b^{k/2} F|^2 following the parity of k.
  double tower_squared(int n, double b, int k, double r, double y) const;

  double min_decay() const { return lambda_ < mu_ ? lambda_ : mu_; }
  std::string describe() const;

 private:
  double lambda_ = 0.5;
  double mu_ = 0.5;
  std::map<Key, double> coef_;
};

}  // namespace polyext
