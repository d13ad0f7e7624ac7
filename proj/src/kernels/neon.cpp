#include <arm_neon.h>

#include "chainmwe/kernels.hpp"

namespace chainmwe::kernels {
namespace {

float dot_neon(const float* x, const float* y, std::size_t n) {
  float32x4_t acc0 = vdupq_n_f32(0.0f);
  float32x4_t acc1 = vdupq_n_f32(0.0f);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = vfmaq_f32(acc0, vld1q_f32(x + i), vld1q_f32(y + i));
    acc1 = vfmaq_f32(acc1, vld1q_f32(x + i + 4), vld1q_f32(y + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = vfmaq_f32(acc0, vld1q_f32(x + i), vld1q_f32(y + i));
  float sum = vaddvq_f32(vaddq_f32(acc0, acc1));
  for (; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

void axpy_neon(float a, const float* x, float* y, std::size_t n) {
  const float32x4_t va = vdupq_n_f32(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) vst1q_f32(y + i, vfmaq_f32(vld1q_f32(y + i), va, vld1q_f32(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_neon(float a, float* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) vst1q_f32(x + i, vmulq_n_f32(vld1q_f32(x + i), a));
  for (; i < n; ++i) x[i] *= a;
}

double dot_wide_neon(const float* x, const float* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t vx = vld1q_f32(x + i);
    const float32x4_t vy = vld1q_f32(y + i);
    acc0 = vfmaq_f64(acc0, vcvt_f64_f32(vget_low_f32(vx)), vcvt_f64_f32(vget_low_f32(vy)));
    acc1 = vfmaq_f64(acc1, vcvt_high_f64_f32(vx), vcvt_high_f64_f32(vy));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += static_cast<double>(x[i]) * static_cast<double>(y[i]);
  return sum;
}

void gemv_neon(const float* matrix, std::size_t rows, const float* query, std::size_t n, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_wide_neon(matrix + r * n, query, n);
}

}  // namespace

const KernelTable& neon_table() {
  static const KernelTable table{Isa::Neon, "neon", dot_neon, axpy_neon, scale_neon, dot_wide_neon, gemv_neon};
  return table;
}

}  // namespace chainmwe::kernels
