#include "nsdc/stencil.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "stencil_kernel.hpp"

namespace nsdc {
namespace {

// Entry = c + p * m47 + q * m48 (order 8) or c + p * m36 (order 6, q unused).
struct Affine {
  double c, p, q;
};

// Rows 1..s of the coupling matrix; the rest follow from the central
// antisymmetry M(i, j) = -M(2s+1-i, 2s+1-j).
constexpr Affine kTable8[4][8] = {
    {{5.0 / 336, 0, 1},
     {-83.0 / 3600, -1.0 / 5, -14.0 / 5},
     {299.0 / 50400, 2.0 / 5, 13.0 / 5},
     {17.0 / 12600, -1.0 / 5, -4.0 / 5},
     {1.0 / 1120, 0, 0},
     {0, 0, 0},
     {0, 0, 0},
     {0, 0, 0}},
    {{-11.0 / 560, 0, -2},
     {-31.0 / 360, 1, 3},
     {41.0 / 200, -9.0 / 5, 4.0 / 5},
     {-5927.0 / 50400, 4.0 / 5, -9.0 / 5},
     {17.0 / 600, -1.0 / 5, -4.0 / 5},
     {-503.0 / 50400, 1.0 / 5, 4.0 / 5},
     {0, 0, 0},
     {0, 0, 0}},
    {{-1.0 / 280, 0, 0},
     {1097.0 / 5040, -2, 6},
     {-1349.0 / 10080, 3, -12},
     {-887.0 / 5040, -1, 6},
     {3613.0 / 50400, 4.0 / 5, -9.0 / 5},
     {467.0 / 25200, -3.0 / 5, 18.0 / 5},
     {139.0 / 25200, -1.0 / 5, -9.0 / 5},
     {0, 0, 0}},
    {{17.0 / 1680, 0, 2},
     {-319.0 / 2520, 2, -8},
     {-919.0 / 5040, -2, 6},
     {-445.0 / 2016, 0, 0},
     {583.0 / 720, -1, 6},
     {-65.0 / 224, 0, -7},
     {0, 1, 0},
     {0, 0, 1}},
};

constexpr Affine kTable6[3][6] = {
    {{-11.0 / 180, 1, 0},
     {1.0 / 9, -2, 0},
     {-1.0 / 18, 1, 0},
     {1.0 / 180, 0, 0},
     {0, 0, 0},
     {0, 0, 0}},
    {{7.0 / 60, -3, 0},
     {-1.0 / 120, 5, 0},
     {-17.0 / 90, -2, 0},
     {5.0 / 72, 1, 0},
     {1.0 / 90, -1, 0},
     {0, 0, 0}},
    {{-1.0 / 15, 3, 0},
     {-11.0 / 60, -3, 0},
     {-101.0 / 360, 0, 0},
     {137.0 / 180, -2, 0},
     {-83.0 / 360, 1, 0},
     {0, 1, 0}},
};

// Leading truncation error coefficients, one per derivative split
// a^(k) u^(order+2-k). The bound is the sum of their absolute values.
constexpr Affine kTrunc8[10] = {
    {-1.0 / 3150, 0, 0},          {-1.0 / 630, 0, 0},
    {-1.0 / 35, 0, 0},            {-113.0 / 840, 0, -4},
    {-487.0 / 1680, 0, -14},      {-4513.0 / 12600, 2.0 / 5, -92.0 / 5},
    {-2777.0 / 10080, 1, -11},    {-3181.0 / 25200, 4.0 / 5, -14.0 / 5},
    {-1403.0 / 50400, 1.0 / 5, -1.0 / 5}, {-1.0 / 630, 0, 0},
};

constexpr Affine kTrunc6[8] = {
    {1.0 / 560, 0, 0},      {1.0 / 140, 0, 0}, {3.0 / 40, 0, 0}, {47.0 / 180, -2, 0},
    {281.0 / 720, -5, 0},   {49.0 / 180, -4, 0}, {29.0 / 360, -1, 0}, {1.0 / 140, 0, 0},
};

double eval(const Affine& t, double x, double y) { return t.c + t.p * x + t.q * y; }

void check_params(int order, const std::vector<double>& params) {
  if (order == 8) {
    if (params.size() != 2)
      throw std::invalid_argument("order 8 takes two parameters {m47, m48}");
  } else if (order == 6) {
    if (params.size() != 1) throw std::invalid_argument("order 6 takes one parameter {m36}");
  } else {
    throw std::invalid_argument("stencil order must be 6 or 8, got " + std::to_string(order));
  }
}

// Periodic copy of f into a buffer valid on [-(s-1), n+s-1]; returns the
// pointer to element 0.
double* pad_periodic(const Field& f, int s, std::vector<double>& buf) {
  const int n = static_cast<int>(f.size());
  buf.resize(n + 2 * s - 1);
  double* p = buf.data() + (s - 1);
  for (int i = 0; i < n; ++i) p[i] = f[i];
  for (int i = 1; i < s; ++i) p[-i] = f[n - i];
  for (int i = 0; i < s; ++i) p[n + i] = f[i];
  return p;
}

}  // namespace

StencilMatrix build_narrow(int order, const std::vector<double>& params) {
  check_params(order, params);
  StencilMatrix out;
  out.params = params;
  out.s = order == 8 ? 4 : 3;
  const int s = out.s;
  const double x = params[0];
  const double y = order == 8 ? params[1] : 0.0;
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < 2 * s; ++j) {
      const Affine& t = order == 8 ? kTable8[i][j] : kTable6[i][j];
      out.m[i][j] = eval(t, x, y);
      out.m[2 * s - 1 - i][2 * s - 1 - j] = -out.m[i][j];
    }
  return out;
}

Field apply_narrow(const StencilMatrix& m, const Field& a, const Field& u, double dx) {
  const int n = static_cast<int>(u.size());
  const int s = m.s;
  if (a.size() != u.size()) throw std::invalid_argument("apply_narrow: size mismatch");
  if (n < 2 * s) throw std::invalid_argument("apply_narrow: grid too small for stencil");
  if (!(dx > 0.0)) throw std::invalid_argument("apply_narrow: dx must be positive");

  std::vector<double> abuf, ubuf;
  const double* ap = pad_periodic(a, s, abuf);
  const double* up = pad_periodic(u, s, ubuf);
  std::vector<double> h(n);
  if (s == 4)
    detail::narrow_interfaces<4>(ap, up, n, m.m, h.data());
  else
    detail::narrow_interfaces<3>(ap, up, n, m.m, h.data());

  Field out(n);
  const double inv = 1.0 / (dx * dx);
  out[0] = (h[0] - h[n - 1]) * inv;
  for (int i = 1; i < n; ++i) out[i] = (h[i] - h[i - 1]) * inv;
  return out;
}

Field first_derivative8(const Field& u, double dx) {
  const int n = static_cast<int>(u.size());
  if (n < 9) throw std::invalid_argument("first_derivative8: need at least 9 points");
  if (!(dx > 0.0)) throw std::invalid_argument("first_derivative8: dx must be positive");
  std::vector<double> buf(n + 8);
  double* p = buf.data() + 4;
  for (int i = 0; i < n; ++i) p[i] = u[i];
  for (int i = 1; i <= 4; ++i) p[-i] = u[n - i];
  for (int i = 0; i < 4; ++i) p[n + i] = u[i];
  Field out(n);
  detail::deriv8(p, n, 1.0 / dx, out.data());
  return out;
}

Field apply_wide(const Field& a, const Field& u, double dx) {
  if (a.size() != u.size()) throw std::invalid_argument("apply_wide: size mismatch");
  Field du = first_derivative8(u, dx);
  for (std::size_t i = 0; i < du.size(); ++i) du[i] *= a[i];
  return first_derivative8(du, dx);
}

double truncation_bound(int order, const std::vector<double>& params) {
  check_params(order, params);
  const double x = params[0];
  const double y = order == 8 ? params[1] : 0.0;
  double sum = 0.0;
  if (order == 8)
    for (const Affine& t : kTrunc8) sum += std::fabs(eval(t, x, y));
  else
    for (const Affine& t : kTrunc6) sum += std::fabs(eval(t, x, y));
  return sum;
}

std::vector<double> optimize_params(int order) {
  if (order == 6) {
    // One variable: the objective is piecewise linear in m36 with kinks where
    // a parameter-dependent coefficient vanishes.
    double best_x = 0.0;
    double best = truncation_bound(6, {0.0});
    for (const Affine& t : kTrunc6) {
      if (t.p == 0.0) continue;
      const double x = -t.c / t.p;
      const double v = truncation_bound(6, {x});
      if (v < best) {
        best = v;
        best_x = x;
      }
    }
    return {best_x};
  }
  if (order != 8) throw std::invalid_argument("optimize_params: order must be 6 or 8");

  // Two variables: the minimum of a sum of absolute affine functions sits at
  // an intersection of two zero lines. Enumerate all pairs.
  std::vector<std::array<double, 2>> candidates{{0.0, 0.0}};
  constexpr int nt = 10;
  for (int i = 0; i < nt; ++i) {
    for (int j = i + 1; j < nt; ++j) {
      const Affine& ti = kTrunc8[i];
      const Affine& tj = kTrunc8[j];
      const double det = ti.p * tj.q - ti.q * tj.p;
      if (std::fabs(det) < 1e-12) continue;
      candidates.push_back({(-ti.c * tj.q + tj.c * ti.q) / det,
                            (-ti.p * tj.c + tj.p * ti.c) / det});
    }
  }
  std::array<double, 2> best_xy = candidates[0];
  double best = truncation_bound(8, {best_xy[0], best_xy[1]});
  for (const auto& c : candidates) {
    const double v = truncation_bound(8, {c[0], c[1]});
    if (v < best) {
      best = v;
      best_xy = c;
    }
  }
  return {best_xy[0], best_xy[1]};
}

StencilChoice stencil_preset(std::string_view name) {
  if (name == "SMC") return StencilChoice::narrow8(kSmcM47, kSmcM48);
  if (name == "ZERO") return StencilChoice::narrow8(0.0, 0.0);
  if (name == "OPTIMAL") return StencilChoice::narrow8(kOptimalM47, kOptimalM48);
  if (name == "NARROW6") return StencilChoice::narrow6(kDefaultM36);
  if (name == "WIDE") return StencilChoice::wide8();
  throw std::invalid_argument("unknown stencil preset: " + std::string(name));
}

}  // namespace nsdc
