#pragma once

#include <vector>

namespace chns::detail {

// Sum of row_fn(j) for j in [0, rows). Rows are evaluated in parallel and the
// partial sums are added in row order, so the result is bit-identical for any
// thread count.
template <class RowFn>
double row_reduce(int rows, RowFn&& row_fn) {
  std::vector<double> partial(rows, 0.0);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < rows; ++j) partial[j] = row_fn(j);
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace chns::detail
