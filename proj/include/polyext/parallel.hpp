#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace polyext {

/// Execution policy for the data-parallel kernels. `serial` is the reference
/// implementation; `parallel` uses OpenMP when available. Both produce
/// bitwise-identical results: rows are reduced independently and their
/// partial sums are added in index order.
enum class Exec { serial, parallel };

/// Number of OpenMP threads available (1 without OpenMP).
int max_threads();

/// Evaluates row(i) for i in [0, rows) under `exec` and returns the
/// per-row values in index order.
std::vector<double> map_rows(Exec exec, std::size_t rows, const std::function<double(std::size_t)>& row);

/// Sum of row(i) over i in [0, rows), reduced in index order.
double sum_rows(Exec exec, std::size_t rows, const std::function<double(std::size_t)>& row);

/// Index-ordered pairwise sum.
double pairwise_sum(const std::vector<double>& v);

}  // namespace polyext
