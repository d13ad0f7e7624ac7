#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "chainmwe/embedding.hpp"
#include "chainmwe/lexicon.hpp"

namespace chainmwe {

enum class Retrieval { NN, CSLS };

std::string_view to_string(Retrieval r);
Retrieval parse_retrieval(std::string_view s);  // "nn" | "csls"

struct EvalConfig {
  Retrieval retrieval = Retrieval::NN;
  std::size_t csls_k = 10;
  std::vector<std::size_t> ks = {1, 5, 10};
  std::string src_lang;
  std::string trg_lang;

  void validate() const;
};

struct ScoredWord {
  std::string key;
  double score = 0.0;
};

// k best candidates by cosine similarity, ties by key byte order. Zero-norm
// vectors score 0 against everything.
std::vector<ScoredWord> topk_cosine(std::span<const float> query, const EmbeddingSpace& candidates, std::size_t k);

// CSLS(x, y) = 2 cos(x, y) - r_T(x) - r_S(y) for every candidate y of
// `trg`, in `trg` row order. r_T(x): mean cosine of x to its csls_k nearest
// targets; r_S(y): mean cosine of y to its csls_k nearest vectors of `src`.
// Throws ConfigError if either side has fewer than csls_k vectors.
std::vector<double> csls_scores(std::span<const float> query, const EmbeddingSpace& src, const EmbeddingSpace& trg,
                                std::size_t csls_k);

struct QueryResult {
  std::string query;
  std::size_t rank_of_first_gold = 0;  // 1-based over all candidates; 0 if no gold word is a candidate
  std::vector<std::string> top;        // best candidates, up to max(10, max k)
};

struct EvalReport {
  Retrieval retrieval = Retrieval::NN;
  std::vector<std::size_t> ks;
  std::vector<double> precision;  // parallel to ks
  std::size_t evaluated = 0;
  std::size_t skipped_oov = 0;
  std::vector<QueryResult> queries;

  double at(std::size_t k) const;
};

// Queries are the unique source words of `test` present in the src_lang
// slice; candidates are the whole trg_lang slice. Throws ConfigError when no
// query is evaluable.
EvalReport precision_at_k(const EmbeddingSpace& space, const Lexicon& test, const EvalConfig& config);

// "P@k value" lines followed by tab-separated "precision\tk\tvalue" lines.
void write_report(const EvalReport& report, std::ostream& out);
// One line per query: query, rank of first gold (or "-"), top-10 words.
void write_predictions(const EvalReport& report, std::ostream& out);

}  // namespace chainmwe
