#pragma once

#include <variant>
#include <vector>

#include "nsdc/matrix.hpp"

namespace nsdc {

enum class NodeKind { GaussLobatto, ClenshawCurtis, Composite };

struct NodeSegment {
  int first = 0;  // index of the segment's left endpoint in nodes
  int last = 0;   // index of its right endpoint
};

/// Quadrature nodes on [0, 1], always including both endpoints, strictly
/// increasing. Composite sets carry the segment structure they were built
/// from; polynomial integration is then exact per segment rather than
/// globally.
struct NodeSet {
  std::vector<double> nodes;
  NodeKind kind = NodeKind::GaussLobatto;
  std::vector<NodeSegment> segments;  // Composite only

  int count() const { return static_cast<int>(nodes.size()); }
  int intervals() const { return count() - 1; }
};

/// Gauss-Lobatto nodes, n >= 2. Interior nodes are the roots of P'_{n-1}.
NodeSet gauss_lobatto(int n);

/// Clenshaw-Curtis nodes (1 - cos(j pi / (n-1))) / 2, n >= 2.
NodeSet clenshaw_curtis(int n);

/// Spectral integration matrices over a node set with M = intervals():
///   Q is M x (M+1):  Q(m, j) = integral_0^{t_{m+1}} of cardinal poly j
///   S is M x (M+1):  S(m, j) = integral_{t_m}^{t_{m+1}} of cardinal poly j
/// so that (Q F)_m approximates int_0^{t_{m+1}} f and (S F)_m the integral
/// over one sub-interval. For composite sets the cardinal basis is piecewise
/// per segment.
struct IntegrationMatrices {
  Matrix q;
  Matrix s;
};

IntegrationMatrices integration_matrices(const NodeSet& nodes);

/// Fine-level layouts for a two-rate hierarchy.
struct TypeA {
  NodeSet fine;  // one global set that must contain every coarse node
};
struct TypeB {
  NodeSet inner;  // mapped onto each coarse sub-interval
};
struct TypeC {
  NodeSet inner;  // mapped onto each of `repeats` pieces per coarse sub-interval
  int repeats = 1;
};
using FineSpec = std::variant<TypeA, TypeB, TypeC>;

/// Two-level node hierarchy with the cross matrices needed for multirate
/// sweeps. fine_of_coarse[p] is the fine index of coarse node p; p_map[q]
/// is the coarse sub-interval containing fine node q (the last fine node
/// maps to the last coarse interval).
///
/// q21/s21 are M2 x (M1+1) and integrate the coarse-node cardinal basis
/// over fine prefixes/sub-intervals; q22/s22 are the fine set's own
/// integration matrices.
struct MultirateHierarchy {
  NodeSet coarse;
  NodeSet fine;
  Matrix q21, s21;
  Matrix q22, s22;
  std::vector<int> fine_of_coarse;
  std::vector<int> p_map;
};

/// Assembles the hierarchy. Type A fine sets must contain the coarse nodes
/// to within 1e-14 or std::invalid_argument is thrown; types B and C nest by
/// construction. Duplicate nodes arising at segment joins are merged at
/// tolerance 1e-12.
MultirateHierarchy build_hierarchy(const NodeSet& coarse, const FineSpec& spec);

}  // namespace nsdc
