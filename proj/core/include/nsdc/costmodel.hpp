#pragma once

#include <stdexcept>

namespace nsdc {

/// Machine described by peak flop rate (flop/s) and sustained memory
/// bandwidth (byte/s).
struct MachineModel {
  double flops = 0.0;
  double bandwidth = 0.0;
};

/// Flops per grid point to evaluate N coupled narrow second derivatives
/// (shared interface work amortized): 112 N + 111.
inline long long narrow_flops(long long n) {
  if (n < 1) throw std::invalid_argument("narrow_flops: N must be >= 1");
  return 112 * n + 111;
}

/// Flops per grid point for the wide route, which reuses the first
/// derivative across components: 23 N + 8.
inline long long wide_flops(long long n) {
  if (n < 1) throw std::invalid_argument("wide_flops: N must be >= 1");
  return 23 * n + 8;
}

/// Time difference per point, narrow minus wide, in seconds. The narrow
/// route pays the extra (89 N + 103) flops; the wide route instead streams
/// an extra 8 doubles per point through memory.
inline double time_delta(long long n, const MachineModel& m) {
  if (n < 1) throw std::invalid_argument("time_delta: N must be >= 1");
  if (m.flops <= 0.0 || m.bandwidth <= 0.0)
    throw std::invalid_argument("time_delta: machine rates must be positive");
  return static_cast<double>(narrow_flops(n) - wide_flops(n)) / m.flops - 64.0 / m.bandwidth;
}

/// Bandwidth at which the two routes cost the same for a given flop rate.
inline double crossover_bandwidth(long long n, double flops) {
  if (n < 1) throw std::invalid_argument("crossover_bandwidth: N must be >= 1");
  if (flops <= 0.0) throw std::invalid_argument("crossover_bandwidth: flops must be positive");
  return 64.0 * flops / static_cast<double>(narrow_flops(n) - wide_flops(n));
}

}  // namespace nsdc
