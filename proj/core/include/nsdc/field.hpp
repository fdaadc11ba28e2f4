#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace nsdc {

/// A flat state vector. ODE problems use a handful of entries; PDE states
/// are flattened 2-D grids.
using Field = std::vector<double>;

/// Right-hand side callback: writes f(t, u) into out. out is pre-sized to
/// u.size() and may alias nothing.
using Rhs = std::function<void(double t, const Field& u, Field& out)>;

inline double max_norm(const Field& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

/// y += alpha * x
inline void axpy(double alpha, const Field& x, Field& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace nsdc
