#include "colcfg/features.hpp"

#include <cmath>

#include "colcfg/errors.hpp"

namespace colcfg {

ScaleOutFeatures featurize(int scale_out, double data_size_gb) {
  if (scale_out < 1) throw ValidationError("scale_out must be >= 1");
  const double s = static_cast<double>(scale_out);
  return {1.0, data_size_gb / s, std::log2(s), s};
}

double dot(const ScaleOutFeatures& theta, const ScaleOutFeatures& x) {
  double sum = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) sum += theta[i] * x[i];
  return sum;
}

}  // namespace colcfg
