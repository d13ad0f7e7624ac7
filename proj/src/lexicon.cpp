#include "chainmwe/lexicon.hpp"

#include <fstream>
#include <map>
#include <string_view>

#include <spdlog/spdlog.h>

#include "chainmwe/error.hpp"

namespace chainmwe {

std::set<std::string> Lexicon::source_words() const {
  std::set<std::string> out;
  for (const auto& [s, t] : pairs) out.insert(s);
  return out;
}

std::set<std::string> Lexicon::target_words() const {
  std::set<std::string> out;
  for (const auto& [s, t] : pairs) out.insert(t);
  return out;
}

Lexicon Lexicon::inverted() const {
  Lexicon out{trg_lang, src_lang, {}};
  for (const auto& [s, t] : pairs) out.pairs.emplace(t, s);
  return out;
}

Lexicon read_lexicon(std::istream& in, const std::string& source_name, const std::string& src_lang,
                     const std::string& trg_lang, LexiconLoadStats* stats) {
  check_language_id(src_lang);
  check_language_id(trg_lang);
  if (src_lang == trg_lang) throw ConfigError("lexicon source and target language are both '" + src_lang + "'");
  Lexicon lex{src_lang, trg_lang, {}};
  LexiconLoadStats st;
  std::string line;
  std::vector<std::string_view> fields;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    split_tokens(line, fields);
    if (fields.empty()) continue;
    if (fields.size() != 2) {
      throw ParseError(source_name, lineno,
                       "expected 2 whitespace-separated fields, found " + std::to_string(fields.size()));
    }
    ++st.lines;
    if (!lex.pairs.emplace(std::string(fields[0]), std::string(fields[1])).second) ++st.duplicates;
  }
  if (in.bad()) throw IoError("read error on " + source_name);
  st.unique_pairs = lex.size();
  st.unique_source_words = lex.source_words().size();
  st.unique_target_words = lex.target_words().size();
  if (lex.empty()) spdlog::warn("lexicon {} is empty", source_name);
  if (st.duplicates > 0) spdlog::info("lexicon {}: collapsed {} duplicate lines", source_name, st.duplicates);
  if (stats) *stats = st;
  return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path, const std::string& src_lang, const std::string& trg_lang,
                     LexiconLoadStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read lexicon " + path.string());
  return read_lexicon(in, path.string(), src_lang, trg_lang, stats);
}

void save_lexicon(const Lexicon& lex, std::ostream& out) {
  for (const auto& [s, t] : lex.pairs) out << s << ' ' << t << '\n';
}

void save_lexicon(const MultiSourceLexicon& lex, std::ostream& out) {
  for (const auto& [s, t] : lex.pairs) out << s << ' ' << t << '\n';
}

void save_lexicon(const Lexicon& lex, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  save_lexicon(lex, out);
  if (!out) throw IoError("write failed for " + path.string());
}

Lexicon pivot(const Lexicon& pivot_to_k, const Lexicon& pivot_to_i) {
  if (pivot_to_k.src_lang != pivot_to_i.src_lang) {
    throw ConfigError("pivot languages differ: '" + pivot_to_k.src_lang + "' vs '" + pivot_to_i.src_lang + "'");
  }
  if (pivot_to_k.trg_lang == pivot_to_i.trg_lang) {
    throw ConfigError("both lexicons target '" + pivot_to_k.trg_lang + "'; nothing to pivot");
  }
  Lexicon out{pivot_to_k.trg_lang, pivot_to_i.trg_lang, {}};
  // Pairs are sorted by pivot word, so both sides can be walked as runs.
  auto a = pivot_to_k.pairs.begin();
  auto b = pivot_to_i.pairs.begin();
  while (a != pivot_to_k.pairs.end() && b != pivot_to_i.pairs.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      const std::string& p = a->first;
      auto b_run = b;
      for (; a != pivot_to_k.pairs.end() && a->first == p; ++a) {
        for (b = b_run; b != pivot_to_i.pairs.end() && b->first == p; ++b) out.pairs.emplace(a->second, b->second);
      }
    }
  }
  return out;
}

MultiSourceLexicon accumulate(const std::vector<Lexicon>& lexicons, const std::string& trg_lang) {
  MultiSourceLexicon out{trg_lang, {}};
  std::set<std::string> seen;
  for (const auto& lex : lexicons) {
    if (lex.trg_lang != trg_lang) {
      throw ConfigError("lexicon " + lex.src_lang + "-" + lex.trg_lang + " does not target '" + trg_lang + "'");
    }
    if (!seen.insert(lex.src_lang).second) {
      throw ConfigError("source language '" + lex.src_lang + "' appears twice in the accumulated lexicon");
    }
    for (const auto& [s, t] : lex.pairs) out.pairs.emplace(make_key(lex.src_lang, s), t);
  }
  return out;
}

RestrictedLexicon restrict_to_vocab(const MultiSourceLexicon& lexicon, const EmbeddingSpace& src_space,
                                    const Vocabulary& trg_vocab) {
  RestrictedLexicon out{{lexicon.trg_lang, {}}, {}};
  for (const auto& pair : lexicon.pairs) {
    const bool has_src = src_space.contains(pair.first);
    const bool has_trg = trg_vocab.contains(pair.second);
    if (has_src && has_trg) {
      out.lexicon.pairs.insert(pair);
    } else if (!has_src && !has_trg) {
      ++out.dropped.both_oov;
    } else if (!has_src) {
      ++out.dropped.source_oov;
    } else {
      ++out.dropped.target_oov;
    }
  }
  return out;
}

}  // namespace chainmwe
