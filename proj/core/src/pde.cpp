#include "nsdc/pde.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nsdc/parallel.hpp"
#include "stencil_kernel.hpp"

namespace nsdc {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double Grid2D::dx() const { return kTwoPi / nx; }
double Grid2D::dy() const { return kTwoPi / ny; }
double Grid2D::x(int i) const { return i * kTwoPi / nx; }
double Grid2D::y(int j) const { return j * kTwoPi / ny; }

HeatProblem make_t1() {
  constexpr double eps = 0.1;
  HeatProblem p;
  p.epsilon = eps;
  p.a = [](double x, double y) { return 1.0 + eps * std::cos(x) * std::cos(y); };
  p.b = p.a;
  p.g_space = [](double x, double y) {
    return (1.0 + 4.0 * eps * std::cos(x) * std::cos(y)) * std::sin(x) * std::sin(y);
  };
  p.g_time = [](double t) { return std::exp(-t); };
  p.g = [gs = p.g_space, gt = p.g_time](double t, double x, double y) {
    return gs(x, y) * gt(t);
  };
  p.u0 = [](double x, double y) { return std::sin(x) * std::sin(y); };
  p.exact = [](double t, double x, double y) {
    return std::exp(-t) * std::sin(x) * std::sin(y);
  };
  return p;
}

HeatProblem make_t2() {
  constexpr double eps = 0.9;
  constexpr double third_pi = std::numbers::pi / 3.0;
  HeatProblem p;
  p.epsilon = eps;
  p.a = [](double x, double y) { return 1.0 + eps * std::cos(2.0 * x) * std::sin(2.0 * y + third_pi); };
  p.b = [](double x, double y) { return 1.0 + eps * std::cos(2.0 * x + third_pi) * std::sin(2.0 * y); };
  p.u0 = [](double x, double y) { return std::sin(x) * std::sin(y); };
  return p;
}

Field2D eval_on_grid(const Grid2D& g, const std::function<double(double, double)>& fn) {
  Field2D out(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out.at(i, j) = fn(g.x(i), g.y(j));
  return out;
}

struct HeatOperator::Impl {
  Grid2D grid;
  StencilChoice choice;
  int s = 0;  // half width for narrow kernels, 0 for wide
  StencilMatrix mtx;
  Field2D a, b;
  std::vector<double> a_padded;  // pitch rows of a with x wrap for the narrow kernel
  int pitch = 0;
  Field2D g0;  // spatial source factor when separable
  std::function<double(double)> g_time;
  std::function<double(double, double, double)> g_full;
  mutable Field2D w1, w2;  // wide-route temporaries

  const double* a_row(int j) const { return a_padded.data() + static_cast<std::size_t>(j) * pitch + (s - 1); }
};

namespace {

// Copies row j of src (pitch nx) into dst with periodic x wrap; dst points at
// element 0 of a buffer valid on [-(pad_l), nx + pad_r).
inline void load_row_padded(const double* src, int nx, int pad_l, int pad_r, double* dst) {
  for (int i = 0; i < nx; ++i) dst[i] = src[i];
  for (int i = 1; i <= pad_l; ++i) dst[-i] = src[nx - i];
  for (int i = 0; i < pad_r; ++i) dst[nx + i] = src[i];
}

template <int S>
void narrow_rhs_rows(const HeatOperator::Impl& im, double t, const double* u, double* out,
                     int jb, int je) {
  const int nx = im.grid.nx;
  const int ny = im.grid.ny;
  const double inv_dx2 = 1.0 / (im.grid.dx() * im.grid.dx());
  const double inv_dy2 = 1.0 / (im.grid.dy() * im.grid.dy());

  std::vector<double> ubuf(nx + 2 * S - 1);
  std::vector<double> hx(nx), hy_prev(nx), hy_cur(nx);
  const double* rows_u[2 * S];
  const double* rows_b[2 * S];

  auto y_interfaces = [&](int jh, double* h) {
    for (int k = 0; k < 2 * S; ++k) {
      const int row = (jh + k - (S - 1) + ny) % ny;
      rows_u[k] = u + static_cast<std::size_t>(row) * nx;
      rows_b[k] = im.b.v.data() + static_cast<std::size_t>(row) * nx;
    }
    detail::narrow_interfaces_rows<S>(rows_b, rows_u, nx, im.mtx.m, h);
  };

  const bool separable = static_cast<bool>(im.g_time);
  const double gt = separable ? im.g_time(t) : 0.0;

  y_interfaces((jb - 1 + ny) % ny, hy_prev.data());
  for (int j = jb; j < je; ++j) {
    double* up = ubuf.data() + (S - 1);
    load_row_padded(u + static_cast<std::size_t>(j) * nx, nx, S - 1, S, up);
    detail::narrow_interfaces<S>(im.a_row(j), up, nx, im.mtx.m, hx.data());
    y_interfaces(j, hy_cur.data());

    double* orow = out + static_cast<std::size_t>(j) * nx;
    orow[0] = (hx[0] - hx[nx - 1]) * inv_dx2 + (hy_cur[0] - hy_prev[0]) * inv_dy2;
    for (int i = 1; i < nx; ++i)
      orow[i] = (hx[i] - hx[i - 1]) * inv_dx2 + (hy_cur[i] - hy_prev[i]) * inv_dy2;
    if (separable) {
      const double* gs = im.g0.v.data() + static_cast<std::size_t>(j) * nx;
      for (int i = 0; i < nx; ++i) orow[i] += gs[i] * gt;
    } else if (im.g_full) {
      for (int i = 0; i < nx; ++i) orow[i] += im.g_full(t, im.grid.x(i), im.grid.y(j));
    }
    hy_prev.swap(hy_cur);
  }
}

void wide_pass1(const HeatOperator::Impl& im, const double* u, int jb, int je) {
  const int nx = im.grid.nx;
  const int ny = im.grid.ny;
  const double inv_dx = 1.0 / im.grid.dx();
  const double inv_dy = 1.0 / im.grid.dy();
  constexpr double c1 = 4.0 / 5.0, c2 = -1.0 / 5.0, c3 = 4.0 / 105.0, c4 = -1.0 / 280.0;

  std::vector<double> ubuf(nx + 8), dx(nx);
  for (int j = jb; j < je; ++j) {
    double* up = ubuf.data() + 4;
    load_row_padded(u + static_cast<std::size_t>(j) * nx, nx, 4, 4, up);
    detail::deriv8(up, nx, inv_dx, dx.data());
    const double* arow = im.a.v.data() + static_cast<std::size_t>(j) * nx;
    double* w1row = im.w1.v.data() + static_cast<std::size_t>(j) * nx;
    for (int i = 0; i < nx; ++i) w1row[i] = arow[i] * dx[i];

    const double* rp[4], *rm[4];
    for (int k = 1; k <= 4; ++k) {
      rp[k - 1] = u + static_cast<std::size_t>((j + k) % ny) * nx;
      rm[k - 1] = u + static_cast<std::size_t>((j - k + ny) % ny) * nx;
    }
    const double* brow = im.b.v.data() + static_cast<std::size_t>(j) * nx;
    double* w2row = im.w2.v.data() + static_cast<std::size_t>(j) * nx;
    for (int i = 0; i < nx; ++i)
      w2row[i] = brow[i] * ((c1 * (rp[0][i] - rm[0][i]) + c2 * (rp[1][i] - rm[1][i]) +
                             c3 * (rp[2][i] - rm[2][i]) + c4 * (rp[3][i] - rm[3][i])) *
                            inv_dy);
  }
}

void wide_pass2(const HeatOperator::Impl& im, double t, double* out, int jb, int je) {
  const int nx = im.grid.nx;
  const int ny = im.grid.ny;
  const double inv_dx = 1.0 / im.grid.dx();
  const double inv_dy = 1.0 / im.grid.dy();
  constexpr double c1 = 4.0 / 5.0, c2 = -1.0 / 5.0, c3 = 4.0 / 105.0, c4 = -1.0 / 280.0;

  const bool separable = static_cast<bool>(im.g_time);
  const double gt = separable ? im.g_time(t) : 0.0;

  std::vector<double> wbuf(nx + 8), ddx(nx);
  for (int j = jb; j < je; ++j) {
    double* wp = wbuf.data() + 4;
    load_row_padded(im.w1.v.data() + static_cast<std::size_t>(j) * nx, nx, 4, 4, wp);
    detail::deriv8(wp, nx, inv_dx, ddx.data());

    const double* rp[4], *rm[4];
    for (int k = 1; k <= 4; ++k) {
      rp[k - 1] = im.w2.v.data() + static_cast<std::size_t>((j + k) % ny) * nx;
      rm[k - 1] = im.w2.v.data() + static_cast<std::size_t>((j - k + ny) % ny) * nx;
    }
    double* orow = out + static_cast<std::size_t>(j) * nx;
    for (int i = 0; i < nx; ++i)
      orow[i] = ddx[i] + (c1 * (rp[0][i] - rm[0][i]) + c2 * (rp[1][i] - rm[1][i]) +
                          c3 * (rp[2][i] - rm[2][i]) + c4 * (rp[3][i] - rm[3][i])) *
                             inv_dy;
    if (separable) {
      const double* gs = im.g0.v.data() + static_cast<std::size_t>(j) * nx;
      for (int i = 0; i < nx; ++i) orow[i] += gs[i] * gt;
    } else if (im.g_full) {
      for (int i = 0; i < nx; ++i) orow[i] += im.g_full(t, im.grid.x(i), im.grid.y(j));
    }
  }
}

void rhs_raw(const HeatOperator::Impl& im, double t, const double* u, double* out) {
  if (im.s == 4) {
    parallel_for(im.grid.ny, [&](int jb, int je) { narrow_rhs_rows<4>(im, t, u, out, jb, je); });
  } else if (im.s == 3) {
    parallel_for(im.grid.ny, [&](int jb, int je) { narrow_rhs_rows<3>(im, t, u, out, jb, je); });
  } else {
    parallel_for(im.grid.ny, [&](int jb, int je) { wide_pass1(im, u, jb, je); });
    parallel_for(im.grid.ny, [&](int jb, int je) { wide_pass2(im, t, out, jb, je); });
  }
}

}  // namespace

HeatOperator::HeatOperator(const HeatProblem& p, const Grid2D& g, const StencilChoice& choice)
    : impl_(std::make_unique<Impl>()) {
  Impl& im = *impl_;
  im.grid = g;
  im.choice = choice;
  switch (choice.kind) {
    case StencilChoice::Kind::Narrow8:
      im.s = 4;
      im.mtx = build_narrow(8, {choice.params[0], choice.params[1]});
      break;
    case StencilChoice::Kind::Narrow6:
      im.s = 3;
      im.mtx = build_narrow(6, {choice.params[0]});
      break;
    case StencilChoice::Kind::Wide8:
      im.s = 0;
      break;
  }
  const int min_n = im.s == 0 ? 9 : 2 * im.s + 1;
  if (g.nx < min_n || g.ny < min_n)
    throw std::invalid_argument("HeatOperator: grid too small for the chosen stencil");
  if (!p.a || !p.b || !p.u0) throw std::invalid_argument("HeatOperator: incomplete problem");

  im.a = eval_on_grid(g, p.a);
  im.b = eval_on_grid(g, p.b);
  for (double v : im.a.v)
    if (!(v > 0.0)) throw std::invalid_argument("HeatOperator: coefficient a not positive");
  for (double v : im.b.v)
    if (!(v > 0.0)) throw std::invalid_argument("HeatOperator: coefficient b not positive");

  if (im.s > 0) {
    im.pitch = g.nx + 2 * im.s - 1;
    im.a_padded.resize(static_cast<std::size_t>(g.ny) * im.pitch);
    for (int j = 0; j < g.ny; ++j) {
      double* row = im.a_padded.data() + static_cast<std::size_t>(j) * im.pitch + (im.s - 1);
      load_row_padded(im.a.v.data() + static_cast<std::size_t>(j) * g.nx, g.nx, im.s - 1, im.s,
                      row);
    }
  } else {
    im.w1 = Field2D(g.nx, g.ny);
    im.w2 = Field2D(g.nx, g.ny);
  }

  if (p.g_space && p.g_time) {
    im.g0 = eval_on_grid(g, p.g_space);
    im.g_time = p.g_time;
  } else if (p.g) {
    im.g_full = p.g;
  }
}

HeatOperator::~HeatOperator() = default;
HeatOperator::HeatOperator(HeatOperator&&) noexcept = default;
HeatOperator& HeatOperator::operator=(HeatOperator&&) noexcept = default;

const Grid2D& HeatOperator::grid() const { return impl_->grid; }

void HeatOperator::rhs(double t, const Field2D& u, Field2D& out) const {
  const Impl& im = *impl_;
  if (u.nx != im.grid.nx || u.ny != im.grid.ny)
    throw std::invalid_argument("HeatOperator::rhs: field/grid shape mismatch");
  out.nx = u.nx;
  out.ny = u.ny;
  out.v.resize(u.v.size());
  rhs_raw(im, t, u.v.data(), out.v.data());
}

Rhs HeatOperator::as_rhs() const {
  const Impl* im = impl_.get();
  const std::size_t n = static_cast<std::size_t>(im->grid.nx) * im->grid.ny;
  return [im, n](double t, const Field& u, Field& out) {
    if (u.size() != n) throw std::invalid_argument("heat rhs: flat state has wrong size");
    out.resize(n);
    rhs_raw(*im, t, u.data(), out.data());
  };
}

Field2D heat_rhs(const HeatProblem& p, const Grid2D& g, const StencilChoice& choice, double t,
                 const Field2D& u) {
  HeatOperator op(p, g, choice);
  Field2D out(g.nx, g.ny);
  op.rhs(t, u, out);
  return out;
}

double appendix_dt(const Grid2D& g, const HeatProblem& p) {
  double peak = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      peak = std::max(peak, std::max(p.a(g.x(i), g.y(j)), p.b(g.x(i), g.y(j))));
  const double inv2 = 1.0 / (g.dx() * g.dx()) + 1.0 / (g.dy() * g.dy());
  return 0.4 / (inv2 * peak);
}

ErrorNorms error_norms(const Field2D& u, const Field2D& ref) {
  if (u.nx != ref.nx || u.ny != ref.ny)
    throw std::invalid_argument("error_norms: shape mismatch");
  ErrorNorms e;
  double sq = 0.0;
  for (std::size_t i = 0; i < u.v.size(); ++i) {
    const double d = u.v[i] - ref.v[i];
    e.linf = std::max(e.linf, std::fabs(d));
    sq += d * d;
  }
  e.l2 = std::sqrt(sq / static_cast<double>(u.v.size()));
  return e;
}

Field2D restrict_sample(const Field2D& fine, int nx_coarse, int ny_coarse) {
  if (nx_coarse < 1 || ny_coarse < 1 || fine.nx % nx_coarse != 0 || fine.ny % ny_coarse != 0)
    throw std::invalid_argument("restrict_sample: coarse extents must divide fine extents");
  const int rx = fine.nx / nx_coarse;
  const int ry = fine.ny / ny_coarse;
  Field2D out(nx_coarse, ny_coarse);
  for (int j = 0; j < ny_coarse; ++j)
    for (int i = 0; i < nx_coarse; ++i) out.at(i, j) = fine.at(i * rx, j * ry);
  return out;
}

double SplitLinearProblem::exact(double u0, double t) const {
  return u0 * std::exp((l1 + l2) * t);
}

SplitLinearProblem make_split_linear(double l1, double l2) {
  SplitLinearProblem p;
  p.l1 = l1;
  p.l2 = l2;
  p.rhs.f1 = [l1](double, const Field& u, Field& out) {
    out.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = l1 * u[i];
  };
  p.rhs.f2 = [l2](double, const Field& u, Field& out) {
    out.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = l2 * u[i];
  };
  return p;
}

}  // namespace nsdc
