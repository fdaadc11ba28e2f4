#pragma once

#include <array>

namespace nsdc::detail {

// Interface sums for the narrow operator. a and u point at element 0 of
// buffers valid on [-(S-1), n+S-1]; h receives H_{i+1/2} for i in [0, n).
//
// The summation order per interface is fixed (m ascending outer, n ascending
// inner) so that every caller, 1-D or 2-D, serial or partitioned, produces
// identical bits.
template <int S>
inline void narrow_interfaces(const double* a, const double* u, int n,
                              const std::array<std::array<double, 8>, 8>& m, double* h) {
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int mm = -S + 1; mm <= S; ++mm) {
      double v = 0.0;
      for (int nn = -S + 1; nn <= S; ++nn) v += m[mm + S - 1][nn + S - 1] * u[i + nn];
      acc += a[i + mm] * v;
    }
    h[i] = acc;
  }
}

// Same sums with the grid direction transposed: element x of each output row
// is one interface, neighbor offsets select whole rows. rows_a[k] / rows_u[k]
// point at row offset k - (S-1) relative to the interface. Used by the
// y-direction of the 2-D operator; per-element order matches the 1-D kernel.
template <int S>
inline void narrow_interfaces_rows(const double* const* rows_a, const double* const* rows_u,
                                   int n, const std::array<std::array<double, 8>, 8>& m,
                                   double* h) {
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int mm = -S + 1; mm <= S; ++mm) {
      double v = 0.0;
      for (int nn = -S + 1; nn <= S; ++nn) v += m[mm + S - 1][nn + S - 1] * rows_u[nn + S - 1][i];
      acc += rows_a[mm + S - 1][i] * v;
    }
    h[i] = acc;
  }
}

// 8th-order centered first derivative over a padded buffer valid on
// [-4, n+4); out[i] = sum_k c_k (u[i+k] - u[i-k]) / dx.
inline void deriv8(const double* u, int n, double inv_dx, double* out) {
  constexpr double c1 = 4.0 / 5.0, c2 = -1.0 / 5.0, c3 = 4.0 / 105.0, c4 = -1.0 / 280.0;
  for (int i = 0; i < n; ++i)
    out[i] = (c1 * (u[i + 1] - u[i - 1]) + c2 * (u[i + 2] - u[i - 2]) +
              c3 * (u[i + 3] - u[i - 3]) + c4 * (u[i + 4] - u[i - 4])) *
             inv_dx;
}

}  // namespace nsdc::detail
