#pragma once

// Dense float vector kernels used by the trainer and the retrieval code.
//
// Every kernel has a scalar reference implementation. SIMD variants (AVX2+FMA
// on x86-64, NEON on aarch64) are compiled in separate translation units and
// picked at runtime from CPU feature bits. CHAINMWE_ISA=scalar|avx2|neon in
// the environment forces a particular table (falls back to scalar if the
// requested one is unavailable).

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace chainmwe::kernels {

enum class Isa { Scalar, Avx2, Neon };

struct KernelTable {
  Isa isa;
  const char* name;
  // sum_i x[i] * y[i]
  float (*dot)(const float* x, const float* y, std::size_t n);
  // y += a * x
  void (*axpy)(float a, const float* x, float* y, std::size_t n);
  // x *= a
  void (*scale)(float a, float* x, std::size_t n);
  // sum_i x[i] * y[i] accumulated in double; exact for small-integer inputs
  double (*dot_wide)(const float* x, const float* y, std::size_t n);
  // out[r] = dot_wide(matrix row r, query) for a row-major rows x n matrix
  void (*gemv)(const float* matrix, std::size_t rows, const float* query, std::size_t n, double* out);
};

const KernelTable& scalar();

// nullptr when the ISA was not compiled in or the CPU lacks it.
const KernelTable* lookup(Isa isa);

// Table selected for this process; resolved once.
const KernelTable& active();

std::vector<const KernelTable*> available();

std::string_view to_string(Isa isa);

inline float dot(std::span<const float> x, std::span<const float> y) {
  return active().dot(x.data(), y.data(), x.size());
}

inline void axpy(float a, std::span<const float> x, std::span<float> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}

inline void scale(float a, std::span<float> x) { active().scale(a, x.data(), x.size()); }

}  // namespace chainmwe::kernels
