#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace chainmwe {

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
};

template <typename V>
using StringMap = std::unordered_map<std::string, V, StringHash, std::equal_to<>>;

// Throws ConfigError unless `lang` is nonempty and free of whitespace and ':'.
void check_language_id(std::string_view lang);

// A language-tagged, pre-tokenized monolingual corpus: one sentence per line,
// tokens separated by any run of whitespace. Backed either by a file or by an
// in-memory buffer (tests, synthetic data).
class Corpus {
 public:
  static Corpus from_file(std::string language, std::filesystem::path path);
  static Corpus from_text(std::string language, std::string text);

  const std::string& language() const noexcept { return language_; }
  const std::optional<std::filesystem::path>& path() const noexcept { return path_; }

  // ASCII-only lowercasing of tokens, off by default.
  bool lowercase() const noexcept { return lowercase_; }
  void set_lowercase(bool on) noexcept { lowercase_ = on; }

  std::unique_ptr<std::istream> open() const;
  std::uint64_t size_bytes() const;

  using SentenceFn = std::function<void(const std::vector<std::string_view>&)>;

  // Visits every line whose first byte lies in [begin, end). Lines crossing
  // `begin` belong to the previous shard.
  void for_each_sentence(std::uint64_t begin, std::uint64_t end, const SentenceFn& fn) const;
  void for_each_sentence(const SentenceFn& fn) const;

  // Total whitespace-separated tokens (one full pass).
  std::uint64_t token_count() const;

 private:
  Corpus() = default;

  std::string language_;
  std::optional<std::filesystem::path> path_;
  std::shared_ptr<const std::string> text_;
  bool lowercase_ = false;
};

// Splits on runs of " \t\r\n\v\f".
void split_tokens(std::string_view line, std::vector<std::string_view>& out);

struct VocabEntry {
  std::string token;
  std::uint64_t count = 0;
};

// Frequency-ranked token table. Entries are sorted by count descending, ties
// by token byte order (== codepoint order for UTF-8).
class Vocabulary {
 public:
  Vocabulary() = default;

  // Builds from raw counts; applies the min-count and max-size filters.
  static Vocabulary from_counts(const StringMap<std::uint64_t>& counts,
                                std::uint64_t total_tokens, std::uint64_t min_count,
                                std::size_t max_vocab);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<VocabEntry>& entries() const noexcept { return entries_; }
  const VocabEntry& operator[](std::size_t i) const { return entries_[i]; }
  std::optional<std::uint32_t> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }

  // Corpus size before filtering.
  std::uint64_t total_tokens() const noexcept { return total_tokens_; }
  // Sum of counts of retained entries.
  std::uint64_t retained_tokens() const noexcept { return retained_tokens_; }

 private:
  std::vector<VocabEntry> entries_;
  StringMap<std::uint32_t> index_;
  std::uint64_t total_tokens_ = 0;
  std::uint64_t retained_tokens_ = 0;
};

struct VocabSettings {
  std::uint64_t min_count = 3;
  std::size_t max_vocab = 200000;
};

// Throws EmptyVocabularyError when no token survives the filters.
Vocabulary build_vocab(const Corpus& corpus, std::uint64_t min_count, std::size_t max_vocab);
inline Vocabulary build_vocab(const Corpus& corpus, const VocabSettings& s) {
  return build_vocab(corpus, s.min_count, s.max_vocab);
}

// Probability of keeping one occurrence of a token under frequent-word
// subsampling: min(1, (sqrt(f/t) + 1) * t/f) with f = count/total.
double keep_probability(std::uint64_t count, std::uint64_t total_tokens, double threshold);

}  // namespace chainmwe
