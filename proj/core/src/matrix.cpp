#include "nsdc/matrix.hpp"

#include <cmath>
#include <cstdlib>
#include <utility>

namespace nsdc {

bool lu_factor(Matrix& m, std::vector<int>& piv) {
  const int n = m.rows;
  piv.resize(n);
  for (int col = 0; col < n; ++col) {
    int best = col;
    double best_mag = std::fabs(m(col, col));
    for (int r = col + 1; r < n; ++r) {
      const double mag = std::fabs(m(r, col));
      if (mag > best_mag) {
        best = r;
        best_mag = mag;
      }
    }
    piv[col] = best;
    if (best_mag == 0.0) return false;
    if (best != col)
      for (int c = 0; c < n; ++c) std::swap(m(col, c), m(best, c));
    const double inv = 1.0 / m(col, col);
    for (int r = col + 1; r < n; ++r) {
      const double l = m(r, col) * inv;
      m(r, col) = l;
      for (int c = col + 1; c < n; ++c) m(r, c) -= l * m(col, c);
    }
  }
  return true;
}

void lu_solve(const Matrix& m, const std::vector<int>& piv, std::vector<double>& b) {
  const int n = m.rows;
  for (int i = 0; i < n; ++i)
    if (piv[i] != i) std::swap(b[i], b[piv[i]]);
  for (int i = 1; i < n; ++i) {
    double s = b[i];
    for (int j = 0; j < i; ++j) s -= m(i, j) * b[j];
    b[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= m(i, j) * b[j];
    b[i] = s / m(i, i);
  }
}

}  // namespace nsdc
