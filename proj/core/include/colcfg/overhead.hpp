#pragma once

#include <cstddef>
#include <span>

namespace colcfg {

struct OverheadObservation {
  int from = 0;
  int to = 0;
  double overhead_s = 0.0;
};

// overhead(a -> b) = max(0, alpha + beta * |b - a|); zero when a == b.
struct OverheadModel {
  static constexpr double kPriorAlpha = 30.0;
  static constexpr double kPriorBeta = 2.0;
  static constexpr std::size_t kMinObservations = 3;

  double alpha = kPriorAlpha;
  double beta = kPriorBeta;
  bool from_prior = true;

  double operator()(int from, int to) const;
};

// Least squares on (|to - from|, overhead_s). Falls back to the prior below
// kMinObservations. A degenerate design (every |delta| equal) yields the
// minimum-norm solution.
OverheadModel learn_overhead(std::span<const OverheadObservation> history);

}  // namespace colcfg
