#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "nsdc/field.hpp"
#include "nsdc/mrsdc.hpp"
#include "nsdc/stencil.hpp"

namespace nsdc {

/// Uniform periodic grid on [0, 2pi)^2, node-based: x_i = i * 2pi / nx.
struct Grid2D {
  int nx = 0;
  int ny = 0;

  double dx() const;
  double dy() const;
  double x(int i) const;
  double y(int j) const;
};

/// Scalar field on a Grid2D, row-major with x contiguous: v[j * nx + i].
struct Field2D {
  int nx = 0;
  int ny = 0;
  std::vector<double> v;

  Field2D() = default;
  Field2D(int nx_, int ny_) : nx(nx_), ny(ny_), v(static_cast<std::size_t>(nx_) * ny_, 0.0) {}

  double& at(int i, int j) { return v[static_cast<std::size_t>(j) * nx + i]; }
  double at(int i, int j) const { return v[static_cast<std::size_t>(j) * nx + i]; }
};

/// Variable-coefficient heat problem
///   u_t = (a(x, y) u_x)_x + (b(x, y) u_y)_y + g(t, x, y)
/// on the periodic square. exact is null when no closed form is available.
/// When the source separates as g = g_space(x, y) * g_time(t), the split
/// fields are set and the operator caches the spatial factor; g stays the
/// authoritative definition.
struct HeatProblem {
  std::function<double(double x, double y)> a;
  std::function<double(double x, double y)> b;
  std::function<double(double t, double x, double y)> g;  // null means zero source
  std::function<double(double x, double y)> g_space;
  std::function<double(double t)> g_time;
  std::function<double(double x, double y)> u0;
  std::function<double(double t, double x, double y)> exact;  // may be null
  double epsilon = 0.0;
};

/// Smooth test problem with known solution u = e^{-t} sin x sin y,
/// a = b = 1 + 0.1 cos x cos y, and the matching manufactured source.
HeatProblem make_t1();

/// Source-free problem with strongly varying, non-aligned coefficients
/// (epsilon = 0.9); no closed-form solution, errors are measured against a
/// fine-grid reference.
HeatProblem make_t2();

/// Evaluates fn on every grid node.
Field2D eval_on_grid(const Grid2D& g, const std::function<double(double, double)>& fn);

/// Heat right-hand side with the coefficient grids, stencil tables, and
/// source factor cached at construction. rhs() is what the time integrators
/// call; as_rhs() adapts it to flat Field vectors.
class HeatOperator {
 public:
  HeatOperator(const HeatProblem& p, const Grid2D& g, const StencilChoice& choice);
  ~HeatOperator();
  HeatOperator(HeatOperator&&) noexcept;
  HeatOperator& operator=(HeatOperator&&) noexcept;

  void rhs(double t, const Field2D& u, Field2D& out) const;
  Rhs as_rhs() const;
  const Grid2D& grid() const;

  struct Impl;  // defined in pde.cpp

 private:
  std::unique_ptr<Impl> impl_;
};

/// One-shot evaluation of the heat right-hand side.
Field2D heat_rhs(const HeatProblem& p, const Grid2D& g, const StencilChoice& choice,
                 double t, const Field2D& u);

/// Time step from the explicit diffusion stability rule
///   dt = 0.4 / ((1/dx^2 + 1/dy^2) * max over nodes of max(a, b)).
double appendix_dt(const Grid2D& g, const HeatProblem& p);

struct ErrorNorms {
  double linf = 0.0;
  double l2 = 0.0;  // sqrt of the grid-averaged squared difference
};
ErrorNorms error_norms(const Field2D& u, const Field2D& ref);

/// Injects a fine-grid field onto a coarser grid whose nodes are a subset of
/// the fine ones; requires both extents to divide the fine extents.
Field2D restrict_sample(const Field2D& fine, int nx_coarse, int ny_coarse);

/// Scalar split linear test problem u' = l1 u + l2 u with exact solution
/// u0 * exp((l1 + l2) t); f1 carries l1, f2 carries l2.
struct SplitLinearProblem {
  SplitRHS rhs;
  double l1 = 0.0;
  double l2 = 0.0;
  double exact(double u0, double t) const;
};
SplitLinearProblem make_split_linear(double l1, double l2);

}  // namespace nsdc
