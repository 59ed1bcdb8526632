#pragma once
// Dense double-precision kernels used by the iterative centrality solvers
// and the classifier. A scalar reference implementation always exists; an
// AVX2 variant is selected at runtime when the CPU supports it.
//
// KGSTRESS_KERNELS=scalar|avx2 in the environment forces a backend
// (equivalence tests run both and compare).

#include <cstddef>
#include <span>
#include <string_view>

namespace kgstress::kernels {

struct Backend {
  double (*dot)(std::span<const double>, std::span<const double>);
  double (*l1_diff)(std::span<const double>, std::span<const double>);
  double (*l2_norm)(std::span<const double>);
  double (*sum)(std::span<const double>);
  void (*axpy)(double, std::span<const double>, std::span<double>);
  void (*scale)(double, std::span<double>);
  const char* name;
};

const Backend& scalar_backend();
#if KGSTRESS_HAVE_AVX2
const Backend& avx2_backend();
#endif

// Backend chosen at first use: env override, else CPU detection.
const Backend& active_backend();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active_backend().dot(a, b);
}
inline double l1_diff(std::span<const double> a, std::span<const double> b) {
  return active_backend().l1_diff(a, b);
}
inline double l2_norm(std::span<const double> a) { return active_backend().l2_norm(a); }
inline double sum(std::span<const double> a) { return active_backend().sum(a); }
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active_backend().axpy(alpha, x, y);
}
inline void scale(double alpha, std::span<double> x) { active_backend().scale(alpha, x); }

}  // namespace kgstress::kernels
