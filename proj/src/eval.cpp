#include "chainmwe/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include <spdlog/spdlog.h>

#include "chainmwe/error.hpp"
#include "chainmwe/kernels.hpp"

namespace chainmwe {

std::string_view to_string(Retrieval r) { return r == Retrieval::NN ? "nn" : "csls"; }

Retrieval parse_retrieval(std::string_view s) {
  if (s == "nn") return Retrieval::NN;
  if (s == "csls") return Retrieval::CSLS;
  throw ConfigError("unknown retrieval '" + std::string(s) + "' (expected nn or csls)");
}

void EvalConfig::validate() const {
  if (ks.empty()) throw ConfigError("at least one cutoff k is required");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 1) throw ConfigError("cutoffs must be >= 1");
    if (i > 0 && ks[i] <= ks[i - 1]) throw ConfigError("cutoffs must be strictly ascending");
  }
  if (csls_k < 1) throw ConfigError("csls_k must be >= 1");
}

double EvalReport::at(std::size_t k) const {
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == k) return precision[i];
  }
  throw ConfigError("report has no cutoff " + std::to_string(k));
}

namespace {

// Row norms of a space, kept alongside the raw float rows.
struct NormedRows {
  const float* data = nullptr;
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> norms;
  std::size_t zero_rows = 0;

  explicit NormedRows(const EmbeddingSpace& s) : data(s.data().data()), rows(s.size()), dim(s.dim()), norms(rows) {
    const auto& k = kernels::active();
    for (std::size_t r = 0; r < rows; ++r) {
      norms[r] = std::sqrt(k.dot_wide(row(r), row(r), dim));
      if (norms[r] == 0.0) ++zero_rows;
    }
  }
  const float* row(std::size_t r) const { return data + r * dim; }

  // out[r] = cos(row r, query); 0 when either side has zero norm.
  void cosines(const float* query, double query_norm, std::vector<double>& out) const {
    out.resize(rows);
    kernels::active().gemv(data, rows, query, dim, out.data());
    for (std::size_t r = 0; r < rows; ++r) {
      out[r] = (query_norm == 0.0 || norms[r] == 0.0) ? 0.0 : out[r] / (query_norm * norms[r]);
    }
  }
};

double norm_of(std::span<const float> q) {
  const double n = std::sqrt(kernels::active().dot_wide(q.data(), q.data(), q.size()));
  if (n == 0.0) spdlog::warn("zero-norm query vector; all cosines are 0");
  return n;
}

void check_dims(std::size_t query_dim, const EmbeddingSpace& s) {
  if (query_dim != s.dim()) {
    throw DimensionError("query dim " + std::to_string(query_dim) + " does not match space dim " +
                         std::to_string(s.dim()));
  }
}

// Mean of the k largest values, summed from the largest down.
double mean_top_k(std::vector<double>& values, std::size_t k) {
  std::partial_sort(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end(), std::greater<>());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += values[i];
  return sum / static_cast<double>(k);
}

// r_S(y) for every y in `trg`: mean cosine to its k nearest rows of `src`.
std::vector<double> neighborhood_density(const NormedRows& trg, const NormedRows& src, std::size_t k) {
  std::vector<double> out(trg.rows);
  std::vector<double> sims;
  for (std::size_t y = 0; y < trg.rows; ++y) {
    src.cosines(trg.row(y), trg.norms[y], sims);
    out[y] = mean_top_k(sims, k);
  }
  return out;
}

void check_csls_k(std::size_t csls_k, const EmbeddingSpace& src, const EmbeddingSpace& trg) {
  const std::size_t smallest = std::min(src.size(), trg.size());
  if (smallest < csls_k) {
    throw ConfigError("csls_k=" + std::to_string(csls_k) + " exceeds the candidate count (" +
                      std::to_string(smallest) + "); lower --csls-k to at most " + std::to_string(smallest));
  }
}

// Candidate ordering: higher score first, then key bytes ascending.
struct Ranker {
  const std::vector<double>& scores;
  const std::vector<std::string>& keys;
  bool operator()(std::size_t a, std::size_t b) const {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return keys[a] < keys[b];
  }
};

std::vector<std::size_t> top_indices(const Ranker& better, std::size_t n, std::size_t k) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  k = std::min(k, n);
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), better);
  idx.resize(k);
  return idx;
}

}  // namespace

std::vector<ScoredWord> topk_cosine(std::span<const float> query, const EmbeddingSpace& candidates, std::size_t k) {
  check_dims(query.size(), candidates);
  if (k < 1) throw ConfigError("k must be >= 1");
  const NormedRows cand(candidates);
  if (cand.zero_rows > 0) spdlog::warn("{} zero-norm candidate vectors score 0", cand.zero_rows);
  std::vector<double> scores;
  cand.cosines(query.data(), norm_of(query), scores);
  std::vector<ScoredWord> out;
  for (auto i : top_indices(Ranker{scores, candidates.keys()}, cand.rows, k)) {
    out.push_back({candidates.key(i), scores[i]});
  }
  return out;
}

std::vector<double> csls_scores(std::span<const float> query, const EmbeddingSpace& src, const EmbeddingSpace& trg,
                                std::size_t csls_k) {
  check_dims(query.size(), trg);
  check_dims(query.size(), src);
  if (csls_k < 1) throw ConfigError("csls_k must be >= 1");
  check_csls_k(csls_k, src, trg);
  const NormedRows t(trg), s(src);
  std::vector<double> sims;
  t.cosines(query.data(), norm_of(query), sims);
  std::vector<double> tmp = sims;
  const double r_query = mean_top_k(tmp, csls_k);
  const auto r_trg = neighborhood_density(t, s, csls_k);
  std::vector<double> out(t.rows);
  for (std::size_t y = 0; y < t.rows; ++y) out[y] = 2.0 * sims[y] - r_query - r_trg[y];
  return out;
}

EvalReport precision_at_k(const EmbeddingSpace& space, const Lexicon& test, const EvalConfig& config) {
  config.validate();
  const EmbeddingSpace src = language_slice(space, config.src_lang);
  const EmbeddingSpace trg = language_slice(space, config.trg_lang);
  if (config.retrieval == Retrieval::CSLS) check_csls_k(config.csls_k, src, trg);

  std::map<std::string, std::vector<std::string>> gold;  // query word -> gold target words
  for (const auto& [s, t] : test.pairs) gold[s].push_back(t);

  EvalReport report;
  report.retrieval = config.retrieval;
  report.ks = config.ks;
  report.precision.assign(config.ks.size(), 0.0);

  const NormedRows t(trg), s(src);
  if (t.zero_rows > 0) spdlog::warn("{} zero-norm target vectors score 0", t.zero_rows);
  std::vector<double> r_trg;
  if (config.retrieval == Retrieval::CSLS) r_trg = neighborhood_density(t, s, config.csls_k);

  const std::size_t depth = std::max<std::size_t>(10, config.ks.back());
  std::vector<std::size_t> hits(config.ks.size(), 0);
  std::vector<double> sims;
  std::vector<double> scores(t.rows);

  for (const auto& [word, targets] : gold) {
    auto qrow = src.find(make_key(config.src_lang, word));
    if (!qrow) {
      ++report.skipped_oov;
      continue;
    }
    ++report.evaluated;
    t.cosines(s.row(*qrow), s.norms[*qrow], sims);
    if (config.retrieval == Retrieval::CSLS) {
      std::vector<double> tmp = sims;
      const double r_query = mean_top_k(tmp, config.csls_k);
      for (std::size_t y = 0; y < t.rows; ++y) scores[y] = 2.0 * sims[y] - r_query - r_trg[y];
    } else {
      scores = sims;
    }
    const Ranker better{scores, trg.keys()};

    // Full rank of the best-placed gold word.
    std::size_t best_rank = 0;
    for (const auto& g : targets) {
      auto grow = trg.find(make_key(config.trg_lang, g));
      if (!grow) continue;
      std::size_t rank = 1;
      for (std::size_t y = 0; y < t.rows; ++y) {
        if (better(y, *grow)) ++rank;
      }
      if (best_rank == 0 || rank < best_rank) best_rank = rank;
    }
    for (std::size_t i = 0; i < config.ks.size(); ++i) {
      if (best_rank != 0 && best_rank <= config.ks[i]) ++hits[i];
    }
    QueryResult qr{word, best_rank, {}};
    for (auto y : top_indices(better, t.rows, depth)) qr.top.push_back(TaggedWord::parse(trg.key(y)).word);
    report.queries.push_back(std::move(qr));
  }

  if (report.evaluated == 0) {
    throw ConfigError("none of the " + std::to_string(gold.size()) + " test source words occur in the '" +
                      config.src_lang + "' slice of the space");
  }
  for (std::size_t i = 0; i < hits.size(); ++i) {
    report.precision[i] = static_cast<double>(hits[i]) / static_cast<double>(report.evaluated);
  }
  return report;
}

void write_report(const EvalReport& report, std::ostream& out) {
  char buf[64];
  out << "retrieval " << to_string(report.retrieval) << '\n';
  out << "queries " << report.evaluated << " evaluated, " << report.skipped_oov << " skipped (oov)\n";
  for (std::size_t i = 0; i < report.ks.size(); ++i) {
    std::snprintf(buf, sizeof buf, "P@%zu %.4f\n", report.ks[i], report.precision[i]);
    out << buf;
  }
  for (std::size_t i = 0; i < report.ks.size(); ++i) {
    std::snprintf(buf, sizeof buf, "precision\t%zu\t%.6f\n", report.ks[i], report.precision[i]);
    out << buf;
  }
  out << "evaluated\t0\t" << report.evaluated << '\n';
  out << "skipped_oov\t0\t" << report.skipped_oov << '\n';
}

void write_predictions(const EvalReport& report, std::ostream& out) {
  for (const auto& q : report.queries) {
    out << q.query << '\t';
    if (q.rank_of_first_gold == 0) {
      out << '-';
    } else {
      out << q.rank_of_first_gold;
    }
    out << '\t';
    for (std::size_t i = 0; i < q.top.size() && i < 10; ++i) out << (i ? " " : "") << q.top[i];
    out << '\n';
  }
}

}  // namespace chainmwe
