#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "nsdc/field.hpp"

namespace nsdc {

/// Interface coupling matrix for the narrow variable-coefficient second
/// derivative. The flux through interface i+1/2 couples coefficient values
/// a_{i+m} and state values u_{i+n} for m, n in -s+1 .. s:
///
///   H_{i+1/2} = sum_{m,n} a_{i+m} M(m, n) u_{i+n}
///   out_i     = (H_{i+1/2} - H_{i-1/2}) / dx^2
///
/// s = 4 gives the 8th-order operator (two free parameters), s = 3 the
/// 6th-order one (one free parameter).
struct StencilMatrix {
  int s = 0;
  std::array<std::array<double, 8>, 8> m{};  // top-left 2s x 2s block is used
  std::vector<double> params;

  /// M(m, n) with m, n in -s+1 .. s.
  double at(int mm, int nn) const { return m[mm + s - 1][nn + s - 1]; }
};

/// Parameter pairs published for the 8th-order operator.
inline constexpr double kSmcM47 = 3557.0 / 44100.0;
inline constexpr double kSmcM48 = -2083.0 / 117600.0;
inline constexpr double kOptimalM47 = 1059283.0 / 13608000.0;
inline constexpr double kOptimalM48 = -856481.0 / 40824000.0;
/// Default free parameter for the 6th-order operator.
inline constexpr double kDefaultM36 = 281.0 / 3600.0;

/// Builds the coupling matrix for the given order (8 or 6). params supplies
/// the free entries: {m47, m48} for order 8, {m36} for order 6. Throws
/// std::invalid_argument on bad order or parameter count.
StencilMatrix build_narrow(int order, const std::vector<double>& params);

/// Applies the narrow operator on a periodic grid of n = u.size() points.
/// Requires a.size() == u.size() and n >= 2s.
Field apply_narrow(const StencilMatrix& m, const Field& a, const Field& u, double dx);

/// Applies the wide operator D(a Du) built from two passes of the standard
/// 8th-order centered first derivative. Periodic; requires n >= 9.
Field apply_wide(const Field& a, const Field& u, double dx);

/// Standard 8th-order centered first derivative on a periodic grid.
Field first_derivative8(const Field& u, double dx);

/// Sum of absolute values of the leading truncation error coefficients as a
/// function of the free parameters; the objective the published parameter
/// choices minimize.
double truncation_bound(int order, const std::vector<double>& params);

/// Minimizes truncation_bound over the free parameters. The objective is
/// piecewise linear, so the minimum sits at a vertex where two of the
/// parameter-dependent coefficients vanish (order 8) or at a breakpoint
/// (order 6); those candidates are enumerated exactly.
std::vector<double> optimize_params(int order);

/// A concrete operator choice for assembling PDE right-hand sides.
struct StencilChoice {
  enum class Kind { Narrow8, Narrow6, Wide8 };
  Kind kind = Kind::Narrow8;
  std::array<double, 2> params{};  // {m47, m48}, {m36, unused}, or unused

  static StencilChoice narrow8(double m47, double m48) {
    return {Kind::Narrow8, {m47, m48}};
  }
  static StencilChoice narrow6(double m36) { return {Kind::Narrow6, {m36, 0.0}}; }
  static StencilChoice wide8() { return {Kind::Wide8, {0.0, 0.0}}; }
};

/// Looks up a named parameter preset: "SMC", "ZERO", "OPTIMAL" (8th-order
/// narrow), "NARROW6", or "WIDE". Throws std::invalid_argument otherwise.
StencilChoice stencil_preset(std::string_view name);

}  // namespace nsdc
