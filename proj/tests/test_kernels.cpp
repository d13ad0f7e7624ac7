#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "chainmwe/kernels.hpp"

using namespace chainmwe::kernels;

namespace {

std::vector<float> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<float> d(0.0f, 1.0f);
  std::vector<float> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

double ref_dot(const std::vector<float>& x, const std::vector<float>& y) {
  long double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += static_cast<long double>(x[i]) * y[i];
  return static_cast<double>(s);
}

}  // namespace

TEST_CASE("scalar table is always available and listed first") {
  const auto tables = available();
  REQUIRE_FALSE(tables.empty());
  CHECK(tables.front()->isa == Isa::Scalar);
  CHECK(lookup(Isa::Scalar) == &scalar());
  CHECK(to_string(Isa::Avx2) == "avx2");
}

TEST_CASE("every kernel table agrees with the scalar reference") {
  std::mt19937_64 rng(7);
  const auto& ref = scalar();
  for (const KernelTable* k : available()) {
    CAPTURE(k->name);
    for (std::size_t n : {0ul, 1ul, 3ul, 4ul, 7ul, 8ul, 15ul, 16ul, 17ul, 31ul, 64ul, 100ul, 300ul, 301ul}) {
      CAPTURE(n);
      const auto x = random_vec(rng, n);
      const auto y = random_vec(rng, n);
      const double exact = ref_dot(x, y);
      const double tol = 1e-5 * (1.0 + std::sqrt(double(n)));
      CHECK(std::fabs(k->dot(x.data(), y.data(), n) - exact) <= tol);
      CHECK(std::fabs(ref.dot(x.data(), y.data(), n) - exact) <= tol);
      CHECK(std::fabs(k->dot_wide(x.data(), y.data(), n) - exact) <= 1e-12 * (1.0 + n));

      auto ya = y, yb = y;
      k->axpy(0.37f, x.data(), ya.data(), n);
      ref.axpy(0.37f, x.data(), yb.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(ya[i] == doctest::Approx(yb[i]).epsilon(1e-6));

      auto xa = x, xb = x;
      k->scale(-1.5f, xa.data(), n);
      ref.scale(-1.5f, xb.data(), n);
      CHECK(xa == xb);  // a single multiply per element is exact in every ISA
    }
  }
}

TEST_CASE("gemv computes one wide dot per row") {
  std::mt19937_64 rng(8);
  for (const KernelTable* k : available()) {
    CAPTURE(k->name);
    const std::size_t rows = 9, n = 37;
    const auto m = random_vec(rng, rows * n);
    const auto q = random_vec(rng, n);
    std::vector<double> out(rows);
    k->gemv(m.data(), rows, q.data(), n, out.data());
    for (std::size_t r = 0; r < rows; ++r) {
      CHECK(out[r] == doctest::Approx(k->dot_wide(m.data() + r * n, q.data(), n)).epsilon(1e-15));
    }
  }
}

TEST_CASE("wide dot of small integers is exact in every table") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> d(-3, 3);
  for (const KernelTable* k : available()) {
    for (std::size_t n = 1; n < 70; ++n) {
      std::vector<float> x(n), y(n);
      long long exact = 0;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = float(d(rng));
        y[i] = float(d(rng));
        exact += static_cast<long long>(x[i]) * static_cast<long long>(y[i]);
      }
      CHECK(k->dot_wide(x.data(), y.data(), n) == double(exact));
    }
  }
}
