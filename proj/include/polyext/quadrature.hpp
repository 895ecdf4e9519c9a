#pragma once

#include <functional>
#include <vector>

namespace polyext::quad {

/// Nodes and weights of a one-dimensional quadrature rule.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  double apply(const std::function<double(double)>& f) const;
  void append(const Rule& other);
};

/// Gauss-Legendre rule with `order` points on [a, b].
Rule gauss_legendre(int order, double a, double b);

/// Composite Gauss-Legendre over consecutive panel edges.
Rule composite(const std::vector<double>& edges, int order);

/// `panels + 1` geometrically spaced edges from a to b (0 < a < b).
std::vector<double> geometric_edges(double a, double b, int panels);

/// Rule for  int_0^L x^beta f(x) dx  with beta > -1: the weights carry x^beta.
/// The first panel [0, h0] absorbs the endpoint power through the substitution
/// x = h0 u^{1/(1+beta)}; the rest of [h0, L] is geometrically graded with
/// `panels_per_decade` panels per decade.
Rule power_endpoint(double beta, double length, double h0, int panels_per_decade, int order);

/// Same as power_endpoint with a uniform tail: geometric grading up to `knee`,
/// then uniform panels of width at most `max_width` up to `length`.
Rule power_endpoint_graded(double beta, double length, double h0, double knee, double max_width,
                           int panels_per_decade, int order);

/// Wynn epsilon extrapolation of a sequence of partial sums. Returns the
/// best estimate and writes an error estimate to `err` when non-null.
double wynn_epsilon(const std::vector<double>& partial_sums, double* err = nullptr);

}  // namespace polyext::quad
