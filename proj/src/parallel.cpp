#include "polyext/parallel.hpp"

#include <exception>

#ifdef POLYEXT_HAVE_OPENMP
#include <omp.h>
#endif

namespace polyext {

int max_threads() {
#ifdef POLYEXT_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<double> map_rows(Exec exec, std::size_t rows, const std::function<double(std::size_t)>& row) {
  std::vector<double> out(rows, 0.0);
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < rows; ++i) out[i] = row(i);
    return out;
  }
#ifdef POLYEXT_HAVE_OPENMP
  std::exception_ptr failure = nullptr;
  const auto n = static_cast<long long>(rows);
#pragma omp parallel for schedule(dynamic, 4)
  for (long long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = row(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(polyext_row_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
#else
  for (std::size_t i = 0; i < rows; ++i) out[i] = row(i);
#endif
  return out;
}

double pairwise_sum(const std::vector<double>& v) {
  // Iterative pairwise reduction; order depends only on the length.
  if (v.empty()) return 0.0;
  std::vector<double> level = v;
  while (level.size() > 1) {
    std::vector<double> next((level.size() + 1) / 2);
    for (std::size_t i = 0; i < next.size(); ++i) {
      const std::size_t j = 2 * i;
      next[i] = (j + 1 < level.size()) ? level[j] + level[j + 1] : level[j];
    }
    level.swap(next);
  }
  return level[0];
}

double sum_rows(Exec exec, std::size_t rows, const std::function<double(std::size_t)>& row) {
  return pairwise_sum(map_rows(exec, rows, row));
}

}  // namespace polyext
