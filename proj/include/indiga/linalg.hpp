#pragma once

#include <vector>

#include "indiga/rational.hpp"

namespace indiga::linalg {

using Vec = std::vector<Rational>;
using Mat = std::vector<Vec>;  // row-major

// Reduced row echelon form in place; returns rank, optionally the pivot columns.
size_t rref(Mat& m, std::vector<size_t>* pivot_cols = nullptr);

// Canonical kernel basis of the linear map given by `m` acting on R^cols
// (one vector per free column, unit in that slot).
Mat nullspace(Mat m, size_t cols);

}  // namespace indiga::linalg
