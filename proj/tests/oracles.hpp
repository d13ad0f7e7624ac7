#pragma once

// Brute-force reference implementations and random instance generators.
// Nothing here calls into the library code it is compared against, beyond
// the plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "chainmwe/embedding.hpp"
#include "chainmwe/eval.hpp"
#include "chainmwe/lexicon.hpp"

namespace chainmwe::oracle {

// {(k, i) | exists p: (p, k) in a and (p, i) in b}, by nested loops.
inline std::set<WordPair> pivot(const Lexicon& a, const Lexicon& b) {
  std::set<WordPair> out;
  for (const auto& [pa, k] : a.pairs) {
    for (const auto& [pb, i] : b.pairs) {
      if (pa == pb) out.emplace(k, i);
    }
  }
  return out;
}

inline std::set<WordPair> accumulate(const std::vector<Lexicon>& lexicons) {
  std::set<WordPair> out;
  for (const auto& l : lexicons) {
    for (const auto& [s, t] : l.pairs) out.emplace(l.src_lang + ":" + s, t);
  }
  return out;
}

inline double dot(std::span<const float> x, std::span<const float> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += double(x[i]) * double(y[i]);
  return s;
}

inline double cosine(std::span<const float> x, std::span<const float> y) {
  const double nx = std::sqrt(dot(x, x));
  const double ny = std::sqrt(dot(y, y));
  if (nx == 0.0 || ny == 0.0) return 0.0;
  return dot(x, y) / (nx * ny);
}

// Mean of the k largest, added from the largest down.
inline double mean_top(std::vector<double> v, std::size_t k) {
  std::sort(v.begin(), v.end(), std::greater<>());
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += v[i];
  return s / double(k);
}

struct Rows {
  std::vector<std::string> keys;
  std::vector<std::vector<float>> vecs;
};

inline Rows rows_of(const EmbeddingSpace& space, const std::string& lang) {
  Rows r;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& key = space.key(i);
    if (key.compare(0, lang.size() + 1, lang + ":") == 0) {
      r.keys.push_back(key.substr(lang.size() + 1));
      auto row = space.row(i);
      r.vecs.emplace_back(row.begin(), row.end());
    }
  }
  return r;
}

// CSLS of query q against every target row, by direct quadratic evaluation.
inline std::vector<double> csls(const std::vector<float>& q, const Rows& src, const Rows& trg, std::size_t k) {
  std::vector<double> cq;
  for (const auto& t : trg.vecs) cq.push_back(cosine(q, t));
  const double r_q = mean_top(cq, k);
  std::vector<double> out;
  for (std::size_t y = 0; y < trg.vecs.size(); ++y) {
    std::vector<double> cy;
    for (const auto& s : src.vecs) cy.push_back(cosine(trg.vecs[y], s));
    out.push_back(2.0 * cq[y] - r_q - mean_top(cy, k));
  }
  return out;
}

struct Result {
  std::vector<double> precision;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::map<std::string, std::size_t> rank;  // query -> 1-based rank of best gold, 0 if none
  std::map<std::string, std::vector<std::string>> top;
};

// Exhaustive ranked retrieval: every candidate scored, fully sorted.
inline Result precision(const EmbeddingSpace& space, const Lexicon& test, const EvalConfig& cfg) {
  const Rows src = rows_of(space, cfg.src_lang);
  const Rows trg = rows_of(space, cfg.trg_lang);
  Result res;
  std::vector<std::size_t> hits(cfg.ks.size(), 0);
  for (const auto& q : test.source_words()) {
    const auto it = std::find(src.keys.begin(), src.keys.end(), q);
    if (it == src.keys.end()) {
      ++res.skipped;
      continue;
    }
    ++res.evaluated;
    const auto& qv = src.vecs[std::size_t(it - src.keys.begin())];
    std::vector<double> scores;
    if (cfg.retrieval == Retrieval::CSLS) {
      scores = csls(qv, src, trg, cfg.csls_k);
    } else {
      for (const auto& t : trg.vecs) scores.push_back(cosine(qv, t));
    }
    std::vector<std::pair<double, std::string>> ranked;
    for (std::size_t y = 0; y < scores.size(); ++y) ranked.emplace_back(scores[y], trg.keys[y]);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    std::size_t best = 0;
    for (std::size_t pos = 0; pos < ranked.size() && best == 0; ++pos) {
      if (test.pairs.count({q, ranked[pos].second})) best = pos + 1;
    }
    res.rank[q] = best;
    for (std::size_t i = 0; i < cfg.ks.size(); ++i) hits[i] += best != 0 && best <= cfg.ks[i];
    const std::size_t depth = std::min(ranked.size(), std::max<std::size_t>(10, cfg.ks.back()));
    for (std::size_t pos = 0; pos < depth; ++pos) res.top[q].push_back(ranked[pos].second);
  }
  for (auto h : hits) res.precision.push_back(res.evaluated ? double(h) / double(res.evaluated) : 0.0);
  return res;
}

// Random words over a tiny alphabet so that pivots and unions collide often.
inline std::string random_word(std::mt19937_64& rng, std::size_t max_len = 2) {
  static const char letters[] = "abcde";
  std::uniform_int_distribution<std::size_t> len(1, max_len), ch(0, 4);
  std::string w;
  for (std::size_t i = len(rng); i > 0; --i) w += letters[ch(rng)];
  return w;
}

inline Lexicon random_lexicon(std::mt19937_64& rng, const std::string& src, const std::string& trg,
                              std::size_t max_pairs) {
  Lexicon lex{src, trg, {}};
  std::uniform_int_distribution<std::size_t> n(0, max_pairs);
  for (std::size_t i = n(rng); i > 0; --i) lex.pairs.emplace(random_word(rng), random_word(rng));
  return lex;
}

// Small-integer vectors: every dot product is exact in double, so cosine
// ties are genuine and both sides must break them the same way. Some rows
// repeat an earlier vector and a few are zero.
inline EmbeddingSpace random_space(std::mt19937_64& rng, const std::vector<std::string>& langs, std::size_t words,
                                   std::size_t dim) {
  EmbeddingSpace space(dim);
  std::uniform_int_distribution<int> comp(-3, 3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& lang : langs) {
    std::vector<std::vector<float>> made;
    for (std::size_t i = 0; i < words; ++i) {
      std::vector<float> v(dim, 0.0f);
      const double r = u(rng);
      if (!made.empty() && r < 0.1) {
        v = made[std::uniform_int_distribution<std::size_t>(0, made.size() - 1)(rng)];
      } else if (r > 0.02) {
        for (auto& x : v) x = float(comp(rng));
      }
      made.push_back(v);
      space.add(lang, "w" + std::to_string(i), v);
    }
  }
  return space;
}

// Test pairs over the space's words plus a few out-of-vocabulary entries.
inline Lexicon random_test(std::mt19937_64& rng, const std::string& src, const std::string& trg, std::size_t words,
                           std::size_t pairs) {
  Lexicon lex{src, trg, {}};
  std::uniform_int_distribution<std::size_t> w(0, words + words / 10);
  for (std::size_t i = 0; i < pairs; ++i) lex.pairs.emplace("w" + std::to_string(w(rng)), "w" + std::to_string(w(rng)));
  return lex;
}

}  // namespace chainmwe::oracle
