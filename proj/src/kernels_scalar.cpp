#include "kgstress/kernels.hpp"

#include <cmath>

namespace kgstress::kernels {
namespace {

double dot_scalar(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double l1_diff_scalar(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::fabs(a[i] - b[i]);
  return acc;
}

double l2_norm_scalar(std::span<const double> a) {
  double acc = 0.0;
  for (double v : a) acc += v * v;
  return std::sqrt(acc);
}

double sum_scalar(std::span<const double> a) {
  double acc = 0.0;
  for (double v : a) acc += v;
  return acc;
}

void axpy_scalar(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
}

}  // namespace

const Backend& scalar_backend() {
  static const Backend b{dot_scalar, l1_diff_scalar, l2_norm_scalar,
                         sum_scalar, axpy_scalar,    scale_scalar,
                         "scalar"};
  return b;
}

}  // namespace kgstress::kernels
