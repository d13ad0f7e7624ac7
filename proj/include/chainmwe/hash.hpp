#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace chainmwe {

// 64-bit FNV-1a. Stable across platforms and runs, so it can key cache files
// and reproducibility headers.
class Fnv1a {
 public:
  Fnv1a& update(std::string_view bytes);
  Fnv1a& update(std::uint64_t value);
  Fnv1a& update(double value);
  std::uint64_t digest() const noexcept { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::uint64_t hash_file(const std::filesystem::path& path);

// splitmix64 finalizer; derives independent stream seeds from one seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace chainmwe
