#pragma once

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "chainmwe/corpus.hpp"
#include "chainmwe/embedding.hpp"

namespace chainmwe {

using WordPair = std::pair<std::string, std::string>;

// Set of (source word, target word) translation pairs between two languages.
// Many-to-many; no duplicates.
struct Lexicon {
  std::string src_lang;
  std::string trg_lang;
  std::set<WordPair> pairs;

  std::size_t size() const noexcept { return pairs.size(); }
  bool empty() const noexcept { return pairs.empty(); }
  std::set<std::string> source_words() const;
  std::set<std::string> target_words() const;
  // Swaps the direction of every pair.
  Lexicon inverted() const;
};

// Union of lexicons from several source languages into one target. Source
// words carry their language tag ("lang:word") so identical surface forms in
// different languages stay distinct.
struct MultiSourceLexicon {
  std::string trg_lang;
  std::set<WordPair> pairs;  // (tagged source, target word)

  std::size_t size() const noexcept { return pairs.size(); }
  bool empty() const noexcept { return pairs.empty(); }
};

struct LexiconLoadStats {
  std::size_t lines = 0;       // non-empty lines read
  std::size_t duplicates = 0;  // lines collapsed into an existing pair
  std::size_t unique_pairs = 0;
  std::size_t unique_source_words = 0;
  std::size_t unique_target_words = 0;
};

// One pair per line, two whitespace-separated fields. Throws IoError when the
// file cannot be read and ParseError (with line number) on any other arity.
Lexicon load_lexicon(const std::filesystem::path& path, const std::string& src_lang, const std::string& trg_lang,
                     LexiconLoadStats* stats = nullptr);
Lexicon read_lexicon(std::istream& in, const std::string& source_name, const std::string& src_lang,
                     const std::string& trg_lang, LexiconLoadStats* stats = nullptr);

// Lines are written in sorted pair order.
void save_lexicon(const Lexicon& lex, const std::filesystem::path& path);
void save_lexicon(const Lexicon& lex, std::ostream& out);
void save_lexicon(const MultiSourceLexicon& lex, std::ostream& out);

// Joins two dictionaries that share their source (pivot) language:
// {(k, i) | exists p : (p, k) in pivot_to_k and (p, i) in pivot_to_i}.
Lexicon pivot(const Lexicon& pivot_to_k, const Lexicon& pivot_to_i);

// Tagged set union. Every input must target `trg_lang` and the source
// languages must be pairwise distinct; ConfigError otherwise.
MultiSourceLexicon accumulate(const std::vector<Lexicon>& lexicons, const std::string& trg_lang);

struct DropReport {
  std::size_t source_oov = 0;  // source missing, target present
  std::size_t target_oov = 0;  // target missing, source present
  std::size_t both_oov = 0;

  std::size_t total() const noexcept { return source_oov + target_oov + both_oov; }
};

struct RestrictedLexicon {
  MultiSourceLexicon lexicon;
  DropReport dropped;
};

// Keeps pairs whose tagged source exists in `src_space` and whose target is
// in `trg_vocab`.
RestrictedLexicon restrict_to_vocab(const MultiSourceLexicon& lexicon, const EmbeddingSpace& src_space,
                                    const Vocabulary& trg_vocab);

}  // namespace chainmwe
