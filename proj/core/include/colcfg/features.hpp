#pragma once

#include <array>

#include "colcfg/types.hpp"

namespace colcfg {

// Scale-out basis: (1, data/scale_out, log2(scale_out), scale_out)
// with data in GB.
using ScaleOutFeatures = std::array<double, 4>;

inline constexpr std::size_t kScaleOutFeatureCount = 4;

ScaleOutFeatures featurize(int scale_out, double data_size_gb);

inline ScaleOutFeatures featurize(const ExecutionRecord& record) {
  return featurize(record.scale_out, record.context.dataset.size_gb());
}

double dot(const ScaleOutFeatures& theta, const ScaleOutFeatures& x);

}  // namespace colcfg
