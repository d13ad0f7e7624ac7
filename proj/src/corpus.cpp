#include "chainmwe/corpus.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "chainmwe/error.hpp"

namespace chainmwe {

namespace {

constexpr std::string_view kSpace = " \t\r\n\v\f";

void lowercase_ascii(std::string& s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
}

}  // namespace

void check_language_id(std::string_view lang) {
  if (lang.empty()) throw ConfigError("language id must not be empty");
  if (lang.find(':') != std::string_view::npos || lang.find_first_of(kSpace) != std::string_view::npos) {
    throw ConfigError("invalid language id '" + std::string(lang) + "': ':' and whitespace are reserved");
  }
}

Corpus Corpus::from_file(std::string language, std::filesystem::path path) {
  check_language_id(language);
  Corpus c;
  c.language_ = std::move(language);
  c.path_ = std::move(path);
  return c;
}

Corpus Corpus::from_text(std::string language, std::string text) {
  check_language_id(language);
  Corpus c;
  c.language_ = std::move(language);
  c.text_ = std::make_shared<const std::string>(std::move(text));
  return c;
}

std::unique_ptr<std::istream> Corpus::open() const {
  if (path_) {
    auto in = std::make_unique<std::ifstream>(*path_, std::ios::binary);
    if (!*in) throw IoError("cannot read corpus " + path_->string());
    return in;
  }
  return std::make_unique<std::istringstream>(*text_);
}

std::uint64_t Corpus::size_bytes() const {
  if (path_) {
    std::error_code ec;
    auto n = std::filesystem::file_size(*path_, ec);
    if (ec) throw IoError("cannot read corpus " + path_->string() + ": " + ec.message());
    return n;
  }
  return text_->size();
}

void split_tokens(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t pos = line.find_first_not_of(kSpace);
  while (pos != std::string_view::npos) {
    std::size_t end = line.find_first_of(kSpace, pos);
    if (end == std::string_view::npos) end = line.size();
    out.push_back(line.substr(pos, end - pos));
    pos = line.find_first_not_of(kSpace, end);
  }
}

void Corpus::for_each_sentence(std::uint64_t begin, std::uint64_t end, const SentenceFn& fn) const {
  auto in = open();
  std::uint64_t offset = 0;
  std::string line;
  if (begin > 0) {
    // Start at the first line beginning at or after `begin`.
    in->seekg(static_cast<std::streamoff>(begin - 1));
    offset = begin - 1;
    if (!std::getline(*in, line)) return;
    offset += line.size() + 1;
  }
  std::vector<std::string_view> tokens;
  while (offset < end && std::getline(*in, line)) {
    offset += line.size() + 1;
    if (lowercase_) lowercase_ascii(line);
    split_tokens(line, tokens);
    fn(tokens);
  }
  if (in->bad()) throw IoError("read error on corpus for language " + language_);
}

void Corpus::for_each_sentence(const SentenceFn& fn) const {
  for_each_sentence(0, UINT64_MAX, fn);
}

std::uint64_t Corpus::token_count() const {
  std::uint64_t n = 0;
  for_each_sentence([&](const std::vector<std::string_view>& t) { n += t.size(); });
  return n;
}

Vocabulary Vocabulary::from_counts(const StringMap<std::uint64_t>& counts,
                                   std::uint64_t total_tokens, std::uint64_t min_count,
                                   std::size_t max_vocab) {
  Vocabulary v;
  v.total_tokens_ = total_tokens;
  for (const auto& [token, count] : counts) {
    if (count >= min_count) v.entries_.push_back({token, count});
  }
  auto by_rank = [](const VocabEntry& a, const VocabEntry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.token < b.token;
  };
  if (v.entries_.size() > max_vocab) {
    std::partial_sort(v.entries_.begin(), v.entries_.begin() + static_cast<std::ptrdiff_t>(max_vocab),
                      v.entries_.end(), by_rank);
    v.entries_.resize(max_vocab);
  } else {
    std::sort(v.entries_.begin(), v.entries_.end(), by_rank);
  }
  v.index_.reserve(v.entries_.size());
  for (std::size_t i = 0; i < v.entries_.size(); ++i) {
    v.index_.emplace(v.entries_[i].token, static_cast<std::uint32_t>(i));
    v.retained_tokens_ += v.entries_[i].count;
  }
  return v;
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocab(const Corpus& corpus, std::uint64_t min_count, std::size_t max_vocab) {
  if (min_count < 1 || max_vocab < 1) throw ConfigError("min_count and max_vocab must be >= 1");
  StringMap<std::uint64_t> counts;
  std::uint64_t total = 0;
  corpus.for_each_sentence([&](const std::vector<std::string_view>& tokens) {
    for (auto t : tokens) {
      if (auto it = counts.find(t); it != counts.end()) {
        ++it->second;
      } else {
        counts.emplace(std::string(t), 1);
      }
    }
    total += tokens.size();
  });
  Vocabulary v = Vocabulary::from_counts(counts, total, min_count, max_vocab);
  if (v.empty()) {
    throw EmptyVocabularyError("no token of corpus '" + corpus.language() + "' (" + std::to_string(total) +
                               " tokens) reaches min_count=" + std::to_string(min_count));
  }
  spdlog::debug("vocab[{}]: {} types kept of {}, {} tokens", corpus.language(), v.size(), counts.size(), total);
  return v;
}

double keep_probability(std::uint64_t count, std::uint64_t total_tokens, double threshold) {
  assert(count <= total_tokens && total_tokens > 0 && threshold > 0.0);
  const double f = static_cast<double>(count) / static_cast<double>(total_tokens);
  const double p = (std::sqrt(f / threshold) + 1.0) * (threshold / f);
  return std::min(1.0, p);
}

}  // namespace chainmwe
