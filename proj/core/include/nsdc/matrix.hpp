#pragma once

#include <cstddef>
#include <vector>

namespace nsdc {

/// Dense row-major matrix, just big enough for quadrature tables and small
/// Newton systems.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }

  const double* row(int r) const { return a.data() + static_cast<std::size_t>(r) * cols; }
  double* row(int r) { return a.data() + static_cast<std::size_t>(r) * cols; }
};

/// In-place LU factorization with partial pivoting. piv[i] is the row swapped
/// into position i. Returns false if a pivot underflows to zero.
bool lu_factor(Matrix& m, std::vector<int>& piv);

/// Solves m x = b using a factorization from lu_factor; b is overwritten.
void lu_solve(const Matrix& m, const std::vector<int>& piv, std::vector<double>& b);

}  // namespace nsdc
