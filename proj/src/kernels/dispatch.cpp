#include <cstdlib>
#include <string>

#include <spdlog/spdlog.h>

#include "chainmwe/kernels.hpp"

namespace chainmwe::kernels {

#if defined(__x86_64__) || defined(_M_X64)
#define CHAINMWE_HAVE_AVX2 1
const KernelTable& avx2_table();
#endif

#if defined(__aarch64__)
#define CHAINMWE_HAVE_NEON 1
const KernelTable& neon_table();
#endif

const KernelTable* lookup(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return &scalar();
    case Isa::Avx2:
#ifdef CHAINMWE_HAVE_AVX2
      if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &avx2_table();
#endif
      return nullptr;
    case Isa::Neon:
#ifdef CHAINMWE_HAVE_NEON
      return &neon_table();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::vector<const KernelTable*> available() {
  std::vector<const KernelTable*> out;
  for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
    if (const KernelTable* t = lookup(isa)) out.push_back(t);
  }
  return out;
}

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

namespace {

const KernelTable& resolve() {
  if (const char* forced = std::getenv("CHAINMWE_ISA")) {
    const std::string want = forced;
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
      if (want == to_string(isa)) {
        if (const KernelTable* t = lookup(isa)) return *t;
        spdlog::warn("CHAINMWE_ISA={} not available on this machine, using scalar kernels", want);
        return scalar();
      }
    }
    spdlog::warn("unknown CHAINMWE_ISA={}, ignoring", want);
  }
  if (const KernelTable* t = lookup(Isa::Avx2)) return *t;
  if (const KernelTable* t = lookup(Isa::Neon)) return *t;
  return scalar();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = resolve();
  return table;
}

}  // namespace chainmwe::kernels
