#include "chainmwe/kernels.hpp"

namespace chainmwe::kernels {
namespace {

float dot_scalar(const float* x, const float* y, std::size_t n) {
  float sum = 0.0f;
  for (std::size_t i = 0; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

void axpy_scalar(float a, const float* x, float* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(float a, float* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double dot_wide_scalar(const float* x, const float* y, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += static_cast<double>(x[i]) * static_cast<double>(y[i]);
  return sum;
}

void gemv_scalar(const float* matrix, std::size_t rows, const float* query, std::size_t n, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_wide_scalar(matrix + r * n, query, n);
}

}  // namespace

const KernelTable& scalar() {
  static const KernelTable table{Isa::Scalar, "scalar", dot_scalar, axpy_scalar, scale_scalar, dot_wide_scalar,
                                 gemv_scalar};
  return table;
}

}  // namespace chainmwe::kernels
