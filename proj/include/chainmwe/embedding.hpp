#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chainmwe/corpus.hpp"

namespace chainmwe {

// A language-tagged word. Serialized as "lang:word"; the first ':' splits, so
// words may contain ':' but language ids may not.
struct TaggedWord {
  std::string lang;
  std::string word;

  std::string key() const { return lang + ":" + word; }
  // Throws ConfigError on untagged keys.
  static TaggedWord parse(std::string_view key);

  auto operator<=>(const TaggedWord&) const = default;
};

std::string make_key(std::string_view lang, std::string_view word);

// Map from tagged word to a dim-dimensional float vector, stored row-major in
// insertion order. Vectors are kept unnormalized.
class EmbeddingSpace {
 public:
  explicit EmbeddingSpace(std::size_t dim = 0) : dim_(dim) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return keys_.size(); }
  bool empty() const noexcept { return keys_.empty(); }
  const std::set<std::string>& languages() const noexcept { return languages_; }

  // Throws DimensionError on arity mismatch or non-finite components,
  // ConfigError on a duplicate key.
  void add(const TaggedWord& word, std::span<const float> vec);
  void add(std::string_view lang, std::string_view word, std::span<const float> vec) {
    add(TaggedWord{std::string(lang), std::string(word)}, vec);
  }

  const std::string& key(std::size_t row) const { return keys_[row]; }
  std::span<const float> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::optional<std::size_t> find(std::string_view key) const;
  std::optional<std::span<const float>> vector(std::string_view key) const;
  bool contains(std::string_view key) const { return find(key).has_value(); }

  std::span<const float> data() const noexcept { return data_; }
  const std::vector<std::string>& keys() const noexcept { return keys_; }

  // Number of entries tagged `lang`.
  std::size_t count(std::string_view lang) const;

  void reserve(std::size_t rows);

 private:
  std::size_t dim_;
  std::vector<std::string> keys_;
  std::vector<float> data_;
  StringMap<std::size_t> index_;
  std::set<std::string> languages_;
};

// Disjoint union; throws DimensionError on dim mismatch and ConfigError when
// a language of `next` is already present in `prev`. Inputs are untouched.
EmbeddingSpace concat(const EmbeddingSpace& prev, const EmbeddingSpace& next);

// Entries tagged `lang`, in original order; throws ConfigError if absent.
EmbeddingSpace language_slice(const EmbeddingSpace& space, std::string_view lang);

// word2vec text format: "<count> <dim>" header, then "lang:word v1 .. vdim".
// Floats are written in shortest round-trip form, so load_text(save_text(x))
// reproduces every vector bit-for-bit.
void save_text(const EmbeddingSpace& space, const std::filesystem::path& path);
void save_text(const EmbeddingSpace& space, std::ostream& out);
EmbeddingSpace load_text(const std::filesystem::path& path);
EmbeddingSpace load_text(std::istream& in, const std::string& source_name);

}  // namespace chainmwe
