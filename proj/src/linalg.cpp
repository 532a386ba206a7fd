#include "indiga/linalg.hpp"

#include <algorithm>

namespace indiga::linalg {

size_t rref(Mat& m, std::vector<size_t>* pivot_cols) {
  if (pivot_cols) pivot_cols->clear();
  if (m.empty()) return 0;
  size_t rows = m.size(), cols = m[0].size();
  size_t lead = 0;
  for (size_t c = 0; c < cols && lead < rows; ++c) {
    size_t p = lead;
    while (p < rows && m[p][c].is_zero()) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[lead]);
    Rational inv = m[lead][c].inverse();
    for (auto& x : m[lead]) x *= inv;
    for (size_t r = 0; r < rows; ++r) {
      if (r == lead || m[r][c].is_zero()) continue;
      Rational f = m[r][c];
      for (size_t k = c; k < cols; ++k) m[r][k] -= f * m[lead][k];
    }
    if (pivot_cols) pivot_cols->push_back(c);
    ++lead;
  }
  return lead;
}

Mat nullspace(Mat m, size_t cols) {
  std::vector<size_t> pivots;
  size_t rank = rref(m, &pivots);
  std::vector<bool> is_pivot(cols, false);
  for (size_t c : pivots) is_pivot[c] = true;
  Mat basis;
  for (size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    Vec v(cols, Rational(0));
    v[free] = Rational(1);
    for (size_t r = 0; r < rank; ++r) {
      // Row r reads x[pivots[r]] + sum over free columns = 0.
      v[pivots[r]] = -m[r][free];
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace indiga::linalg
