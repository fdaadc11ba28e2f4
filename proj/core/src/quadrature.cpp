#include "nsdc/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nsdc {
namespace {

// Legendre P_n(x) and P'_n(x) by upward recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double pm1 = 1.0, pm = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2 * k - 1) * x * pm - (k - 1) * pm1) / k;
    pm1 = pm;
    pm = pk;
  }
  p = pm;
  dp = n * (x * pm - pm1) / (x * x - 1.0);
}

// Gauss-Legendre rule on [-1, 1], exact through degree 2g - 1.
void gauss_legendre(int g, std::vector<double>& x, std::vector<double>& w) {
  x.assign(g, 0.0);
  w.assign(g, 0.0);
  for (int k = 0; k < (g + 1) / 2; ++k) {
    double xi = std::cos(std::numbers::pi * (4 * k + 3) / (4 * g + 2));
    for (int it = 0; it < 64; ++it) {
      double p, dp;
      legendre(g, xi, p, dp);
      const double dx = p / dp;
      xi -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    double p, dp;
    legendre(g, xi, p, dp);
    x[k] = -xi;
    x[g - 1 - k] = xi;
    w[k] = w[g - 1 - k] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
  if (g % 2 == 1) {
    double p, dp;
    legendre(g, 0.0, p, dp);
    x[g / 2] = 0.0;
    w[g / 2] = 2.0 / (dp * dp);
  }
}

// Pins exact endpoint/midpoint values and the tau_j + tau_{n-1-j} = 1
// symmetry that both node families satisfy.
void symmetrize(std::vector<double>& t) {
  const int n = static_cast<int>(t.size());
  t.front() = 0.0;
  t.back() = 1.0;
  for (int j = 1; j < n / 2; ++j) {
    const double v = 0.5 * (t[j] + 1.0 - t[n - 1 - j]);
    t[j] = v;
    t[n - 1 - j] = 1.0 - v;
  }
  if (n % 2 == 1) t[n / 2] = 0.5;
}

// Lagrange cardinal polynomial j on the given nodes, evaluated directly.
double cardinal(const std::vector<double>& t, int first, int last, int j, double x) {
  double v = 1.0;
  for (int k = first; k <= last; ++k) {
    if (k == j) continue;
    v *= (x - t[k]) / (t[j] - t[k]);
  }
  return v;
}

// Integral over [lo, hi] of cardinal j on nodes t[first..last].
double integrate_cardinal(const std::vector<double>& t, int first, int last, int j, double lo,
                          double hi, const std::vector<double>& gx,
                          const std::vector<double>& gw) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double acc = 0.0;
  for (std::size_t q = 0; q < gx.size(); ++q)
    acc += gw[q] * cardinal(t, first, last, j, mid + half * gx[q]);
  return acc * half;
}

int segment_of_interval(const NodeSet& nodes, int m) {
  if (nodes.kind != NodeKind::Composite) return -1;
  for (std::size_t s = 0; s < nodes.segments.size(); ++s)
    if (m >= nodes.segments[s].first && m < nodes.segments[s].last)
      return static_cast<int>(s);
  throw std::logic_error("interval outside every segment");
}

}  // namespace

NodeSet gauss_lobatto(int n) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto: need at least 2 nodes");
  std::vector<double> t(n);
  t.front() = -1.0;
  t.back() = 1.0;
  // Interior nodes are roots of P'_{n-1}; Newton from Chebyshev-Lobatto
  // starting points, with P'' from the Legendre differential equation.
  for (int j = 1; j < n - 1; ++j) {
    double x = -std::cos(std::numbers::pi * j / (n - 1));
    for (int it = 0; it < 64; ++it) {
      double p, dp;
      legendre(n - 1, x, p, dp);
      const double d2p = (2.0 * x * dp - (n - 1) * n * p) / (1.0 - x * x);
      const double dx = dp / d2p;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    t[j] = x;
  }
  for (double& v : t) v = 0.5 * (1.0 + v);
  symmetrize(t);
  return NodeSet{std::move(t), NodeKind::GaussLobatto, {}};
}

NodeSet clenshaw_curtis(int n) {
  if (n < 2) throw std::invalid_argument("clenshaw_curtis: need at least 2 nodes");
  std::vector<double> t(n);
  for (int j = 0; j < n; ++j)
    t[j] = 0.5 * (1.0 - std::cos(std::numbers::pi * j / (n - 1)));
  symmetrize(t);
  return NodeSet{std::move(t), NodeKind::ClenshawCurtis, {}};
}

IntegrationMatrices integration_matrices(const NodeSet& nodes) {
  const int m = nodes.intervals();
  if (m < 1) throw std::invalid_argument("integration_matrices: need at least 2 nodes");
  IntegrationMatrices out{Matrix(m, m + 1), Matrix(m, m + 1)};

  std::vector<double> gx, gw;
  for (int row = 0; row < m; ++row) {
    int first = 0, last = m;
    if (nodes.kind == NodeKind::Composite) {
      const NodeSegment& seg = nodes.segments[segment_of_interval(nodes, row)];
      first = seg.first;
      last = seg.last;
    }
    const int degree = last - first;
    const int g = degree / 2 + 1;  // exact for polynomials of degree <= 2g-1
    if (static_cast<int>(gx.size()) != g) gauss_legendre(g, gx, gw);
    for (int j = first; j <= last; ++j)
      out.s(row, j) = integrate_cardinal(nodes.nodes, first, last, j, nodes.nodes[row],
                                         nodes.nodes[row + 1], gx, gw);
  }
  for (int row = 0; row < m; ++row)
    for (int j = 0; j <= m; ++j)
      out.q(row, j) = (row == 0 ? 0.0 : out.q(row - 1, j)) + out.s(row, j);
  return out;
}

namespace {

// Appends `inner` mapped onto [lo, hi], merging the shared endpoint.
void append_segment(const NodeSet& inner, double lo, double hi, std::vector<double>& t,
                    std::vector<NodeSegment>& segs) {
  const int first = t.empty() ? 0 : static_cast<int>(t.size()) - 1;
  for (int j = t.empty() ? 0 : 1; j < inner.count(); ++j) {
    double v = lo + (hi - lo) * inner.nodes[j];
    if (j == inner.count() - 1) v = hi;
    if (!t.empty() && std::fabs(v - t.back()) <= 1e-12)
      continue;  // degenerate inner set; keep nodes strictly increasing
    t.push_back(v);
  }
  segs.push_back({first, static_cast<int>(t.size()) - 1});
}

}  // namespace

MultirateHierarchy build_hierarchy(const NodeSet& coarse, const FineSpec& spec) {
  if (coarse.kind == NodeKind::Composite)
    throw std::invalid_argument("build_hierarchy: coarse level must be a simple node set");
  const int m1 = coarse.intervals();
  if (m1 < 1) throw std::invalid_argument("build_hierarchy: coarse level needs an interval");

  MultirateHierarchy h;
  h.coarse = coarse;

  if (const TypeA* a = std::get_if<TypeA>(&spec)) {
    h.fine = a->fine;
    h.fine_of_coarse.assign(m1 + 1, -1);
    for (int p = 0; p <= m1; ++p) {
      for (int q = 0; q < h.fine.count(); ++q)
        if (std::fabs(coarse.nodes[p] - h.fine.nodes[q]) <= 1e-14) {
          h.fine_of_coarse[p] = q;
          break;
        }
      if (h.fine_of_coarse[p] < 0)
        throw std::invalid_argument("build_hierarchy: fine nodes do not contain coarse node " +
                                    std::to_string(p));
    }
  } else {
    const NodeSet& inner =
        std::holds_alternative<TypeB>(spec) ? std::get<TypeB>(spec).inner : std::get<TypeC>(spec).inner;
    const int repeats = std::holds_alternative<TypeC>(spec) ? std::get<TypeC>(spec).repeats : 1;
    if (repeats < 1) throw std::invalid_argument("build_hierarchy: repeats must be >= 1");
    if (inner.kind == NodeKind::Composite)
      throw std::invalid_argument("build_hierarchy: inner set must be simple");

    std::vector<double> t{0.0};
    std::vector<NodeSegment> segs;
    h.fine_of_coarse.assign(m1 + 1, 0);
    for (int p = 0; p < m1; ++p) {
      const double lo = coarse.nodes[p];
      const double hi = coarse.nodes[p + 1];
      for (int r = 0; r < repeats; ++r)
        append_segment(inner, lo + (hi - lo) * r / repeats, lo + (hi - lo) * (r + 1) / repeats,
                       t, segs);
      h.fine_of_coarse[p + 1] = static_cast<int>(t.size()) - 1;
    }
    h.fine = NodeSet{std::move(t), NodeKind::Composite, std::move(segs)};
  }

  const int m2 = h.fine.intervals();
  IntegrationMatrices fine_mats = integration_matrices(h.fine);
  h.q22 = std::move(fine_mats.q);
  h.s22 = std::move(fine_mats.s);

  // p_map: coarse sub-interval owning each fine node; the last node belongs
  // to the last interval.
  h.p_map.assign(m2 + 1, m1 - 1);
  for (int q = 0, p = 0; q <= m2; ++q) {
    while (p + 1 <= m1 && q >= h.fine_of_coarse[p + 1]) ++p;
    h.p_map[q] = std::min(p, m1 - 1);
  }

  // Coarse cardinal basis integrated over fine prefixes and sub-intervals.
  h.s21 = Matrix(m2, m1 + 1);
  h.q21 = Matrix(m2, m1 + 1);
  std::vector<double> gx, gw;
  gauss_legendre(m1 / 2 + 1, gx, gw);
  for (int row = 0; row < m2; ++row)
    for (int j = 0; j <= m1; ++j)
      h.s21(row, j) = integrate_cardinal(coarse.nodes, 0, m1, j, h.fine.nodes[row],
                                         h.fine.nodes[row + 1], gx, gw);
  for (int row = 0; row < m2; ++row)
    for (int j = 0; j <= m1; ++j)
      h.q21(row, j) = (row == 0 ? 0.0 : h.q21(row - 1, j)) + h.s21(row, j);
  return h;
}

}  // namespace nsdc
