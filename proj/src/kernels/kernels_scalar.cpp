#include <cmath>
#include <cstddef>

#include "herdscan/kernels.hpp"

namespace herdscan::kernels::scalar {

double sum(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

void accumulate_diff(std::span<double> acc, std::span<const double> x, std::span<const double> ref) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += x[i] - ref[i];
}

void accumulate_abs_diff(std::span<double> acc, std::span<const double> x,
                         std::span<const double> center) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += std::fabs(x[i] - center[i]);
}

void subtract_scalar(std::span<double> x, double c) {
  for (double& v : x) v -= c;
}

}  // namespace herdscan::kernels::scalar
