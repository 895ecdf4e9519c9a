#include "polyext/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include "polyext/specfun.hpp"

namespace polyext::quad {

namespace {

struct Reference {
  std::vector<double> x;
  std::vector<double> w;
};

// Legendre roots by Newton iteration on the three-term recurrence.
Reference legendre_reference(int n) {
  Reference r;
  r.x.resize(n);
  r.w.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 4 * std::numeric_limits<double>::epsilon()) break;
    }
    // final derivative at the converged root
    double p1 = 1.0;
    double p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    pp = n * (z * p1 - p2) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  return r;
}

const Reference& cached_reference(int n) {
  static std::mutex mutex;
  static std::map<int, Reference> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, legendre_reference(n)).first;
  return it->second;
}

}  // namespace

double Rule::apply(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
  return s;
}

void Rule::append(const Rule& other) {
  nodes.insert(nodes.end(), other.nodes.begin(), other.nodes.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
}

Rule gauss_legendre(int order, double a, double b) {
  if (order < 1) throw DomainError("gauss_legendre: order must be >= 1");
  const Reference& ref = cached_reference(order);
  Rule r;
  r.nodes.resize(order);
  r.weights.resize(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < order; ++i) {
    r.nodes[i] = mid + half * ref.x[i];
    r.weights[i] = half * ref.w[i];
  }
  return r;
}

Rule composite(const std::vector<double>& edges, int order) {
  Rule r;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) r.append(gauss_legendre(order, edges[i], edges[i + 1]));
  return r;
}

std::vector<double> geometric_edges(double a, double b, int panels) {
  if (!(a > 0.0 && b > a) || panels < 1) throw DomainError("geometric_edges: need 0 < a < b, panels >= 1");
  std::vector<double> e(panels + 1);
  const double ratio = std::log(b / a) / panels;
  for (int i = 0; i <= panels; ++i) e[i] = a * std::exp(ratio * i);
  e.front() = a;
  e.back() = b;
  return e;
}

namespace {

Rule absorbed_first_panel(double beta, double h0, int order) {
  // int_0^h0 x^beta f(x) dx = h0^{1+beta}/(1+beta) int_0^1 f(h0 u^{1/(1+beta)}) du
  const double p = 1.0 / (1.0 + beta);
  const double scale = std::pow(h0, 1.0 + beta) / (1.0 + beta);
  Rule base = gauss_legendre(order, 0.0, 1.0);
  Rule r;
  r.nodes.resize(base.size());
  r.weights.resize(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    r.nodes[i] = h0 * std::pow(base.nodes[i], p);
    r.weights[i] = scale * base.weights[i];
  }
  return r;
}

void weight_by_power(Rule& r, double beta) {
  if (beta == 0.0) return;
  for (std::size_t i = 0; i < r.size(); ++i) r.weights[i] *= std::pow(r.nodes[i], beta);
}

}  // namespace

Rule power_endpoint(double beta, double length, double h0, int panels_per_decade, int order) {
  return power_endpoint_graded(beta, length, h0, length, length, panels_per_decade, order);
}

Rule power_endpoint_graded(double beta, double length, double h0, double knee, double max_width,
                           int panels_per_decade, int order) {
  if (!(beta > -1.0)) throw DomainError("power_endpoint: weight x^beta not integrable at 0 (beta <= -1)");
  if (!(length > h0 && h0 > 0.0)) throw DomainError("power_endpoint: need 0 < h0 < length");
  knee = std::clamp(knee, h0, length);
  Rule r = absorbed_first_panel(beta, h0, order);
  if (knee > h0) {
    const int panels = std::max(1, static_cast<int>(std::ceil(std::log10(knee / h0) * panels_per_decade)));
    Rule graded = composite(geometric_edges(h0, knee, panels), order);
    weight_by_power(graded, beta);
    r.append(graded);
  }
  if (length > knee) {
    const int panels = std::max(1, static_cast<int>(std::ceil((length - knee) / max_width)));
    std::vector<double> edges(panels + 1);
    for (int i = 0; i <= panels; ++i) edges[i] = knee + (length - knee) * i / panels;
    Rule uniform = composite(edges, order);
    weight_by_power(uniform, beta);
    r.append(uniform);
  }
  return r;
}

double wynn_epsilon(const std::vector<double>& s, double* err) {
  const std::size_t n = s.size();
  if (n == 0) throw DomainError("wynn_epsilon: empty sequence");
  if (n < 3) {
    if (err) *err = n == 2 ? std::abs(s[1] - s[0]) : std::numeric_limits<double>::infinity();
    return s.back();
  }
  // e[k] holds column k of the epsilon table for the current diagonal sweep.
  std::vector<std::vector<double>> table(n + 1, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) table[i][1] = s[i];
  for (std::size_t k = 2; k <= n; ++k) {
    for (std::size_t i = 0; i + k <= n; ++i) {
      const double diff = table[i + 1][k - 1] - table[i][k - 1];
      const double prev = table[i + 1][k - 2];
      table[i][k] = (diff == 0.0) ? std::numeric_limits<double>::max() : prev + 1.0 / diff;
    }
  }
  // Odd columns (1, 3, 5, ...) carry the estimates; take the deepest stable one.
  double best = s.back();
  double best_err = std::abs(s[n - 1] - s[n - 2]);
  for (std::size_t k = 3; k <= n; k += 2) {
    const std::size_t last = n - k;  // row index of the last entry in column k
    if (last < 1) break;
    const double a = table[last][k];
    const double b = table[last - 1][k];
    if (!std::isfinite(a) || std::abs(a) > 1e300) break;
    const double e = std::abs(a - b);
    if (e <= best_err) {
      best = a;
      best_err = e;
    }
  }
  if (err) *err = best_err;
  return best;
}

}  // namespace polyext::quad
