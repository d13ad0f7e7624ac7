#include "chainmwe/trainer.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include <spdlog/spdlog.h>

#include "chainmwe/error.hpp"
#include "chainmwe/hash.hpp"

namespace chainmwe {

namespace {

constexpr int kNegativeRedraws = 8;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::string_view to_string(TrainMode mode) { return mode == TrainMode::Cbow ? "cbow" : "sg"; }

TrainMode parse_train_mode(std::string_view s) {
  if (s == "cbow") return TrainMode::Cbow;
  if (s == "sg" || s == "skipgram") return TrainMode::SkipGram;
  throw ConfigError("unknown training mode '" + std::string(s) + "' (expected cbow or sg)");
}

void TrainConfig::validate() const {
  if (dim < 1) throw ConfigError("dim must be >= 1");
  if (window < 1) throw ConfigError("window must be >= 1");
  if (negatives < 1) throw ConfigError("negatives must be >= 1");
  if (!(initial_lr > 0.0) || !(min_lr > 0.0) || !(min_lr < initial_lr)) {
    throw ConfigError("learning rates must satisfy 0 < min_lr < initial_lr");
  }
  if (table_size < 1) throw ConfigError("table_size must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

std::size_t AnchorSet::pair_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [w, vs] : anchors) n += vs.size();
  return n;
}

AnchorSet build_anchor_set(const EmbeddingSpace& prev_space, const MultiSourceLexicon& lexicon,
                           const Vocabulary& trg_vocab) {
  RestrictedLexicon kept = restrict_to_vocab(lexicon, prev_space, trg_vocab);
  AnchorSet set;
  set.dim = prev_space.dim();
  set.dropped = kept.dropped;
  for (const auto& [src, trg] : kept.lexicon.pairs) {
    auto v = *prev_space.vector(src);
    set.anchors[trg].emplace_back(v.begin(), v.end());
  }
  if (set.empty()) {
    spdlog::warn("no anchor points for '{}' ({} lexicon pairs, all dropped); training without anchors",
                 lexicon.trg_lang, lexicon.size());
  }
  for (const auto& [w, vs] : set.anchors) {
    if (vs.size() > 1) spdlog::debug("anchor '{}' averages {} source vectors", w, vs.size());
  }
  return set;
}

std::pair<Matrix<float>, Matrix<float>> init_weights(const Vocabulary& vocab, const TrainConfig& config,
                                                      const AnchorSet& anchors) {
  const std::size_t dim = config.dim;
  if (!anchors.empty() && anchors.dim != dim) {
    throw DimensionError("anchor vectors have dim " + std::to_string(anchors.dim) + ", training dim is " +
                         std::to_string(dim));
  }
  Matrix<float> input(vocab.size(), dim);
  Matrix<float> output(vocab.size(), dim);
  std::mt19937_64 rng(mix_seed(config.seed, 0x1a17));
  const double half_width = 0.5 / static_cast<double>(dim);
  for (float& x : input.data) x = static_cast<float>((uniform01(rng) - 0.5) * 2.0 * half_width);

  std::vector<double> mean(dim);
  for (const auto& [word, vectors] : anchors.anchors) {
    auto row = vocab.find(word);
    if (!row) throw ConfigError("anchored word '" + word + "' is not in the target vocabulary");
    std::fill(mean.begin(), mean.end(), 0.0);
    for (const auto& v : vectors) {
      if (v.size() != dim) throw DimensionError("anchor for '" + word + "' has wrong dim");
      for (std::size_t d = 0; d < dim; ++d) mean[d] += v[d];
    }
    auto dst = input.row(*row);
    const double n = static_cast<double>(vectors.size());
    for (std::size_t d = 0; d < dim; ++d) dst[d] = static_cast<float>(mean[d] / n);
  }
  return {std::move(input), std::move(output)};
}

namespace {

struct SharedState {
  const Corpus& corpus;
  const Vocabulary& vocab;
  const TrainConfig& config;
  const UnigramTable& table;
  const std::vector<double>& keep;  // per-word keep probability
  Matrix<float>& input;
  Matrix<float>& output;
  double expected_words;  // decay horizon
  std::atomic<std::uint64_t> processed{0};
};

struct WorkerResult {
  double loss = 0.0;
  std::uint64_t samples = 0;
};

void draw_negatives(const SharedState& st, std::mt19937_64& rng, std::uint32_t positive,
                    std::vector<std::uint32_t>& out) {
  out.clear();
  for (std::size_t n = 0; n < st.config.negatives; ++n) {
    for (int attempt = 0; attempt < kNegativeRedraws; ++attempt) {
      std::uint32_t w = st.table.draw(rng);
      if (w != positive) {
        out.push_back(w);
        break;
      }
    }
  }
}

WorkerResult run_worker(SharedState& st, std::size_t epoch, std::size_t worker, std::uint64_t begin,
                        std::uint64_t end) {
  const TrainConfig& cfg = st.config;
  const auto& k = kernels::active();
  std::mt19937_64 rng(mix_seed(cfg.seed, 1 + epoch * 4096 + worker));
  SgdWorkspace ws(cfg.dim);
  SgnsSample sample;
  std::vector<std::uint32_t> ids;
  WorkerResult res;
  const bool subsample = cfg.subsample_threshold > 0.0;

  st.corpus.for_each_sentence(begin, end, [&](const std::vector<std::string_view>& tokens) {
    ids.clear();
    for (auto t : tokens) {
      auto id = st.vocab.find(t);
      if (!id) continue;
      if (subsample && st.keep[*id] < uniform01(rng)) continue;
      ids.push_back(*id);
    }
    if (ids.empty()) return;
    const std::uint64_t done = st.processed.fetch_add(ids.size(), std::memory_order_relaxed);
    double lr = cfg.initial_lr - (cfg.initial_lr - cfg.min_lr) * static_cast<double>(done) / st.expected_words;
    lr = std::max(lr, cfg.min_lr);
    const float flr = static_cast<float>(lr);

    const std::size_t n = ids.size();
    for (std::size_t pos = 0; pos < n; ++pos) {
      const std::size_t b = 1 + static_cast<std::size_t>(rng() % cfg.window);
      const std::size_t lo = pos >= b ? pos - b : 0;
      const std::size_t hi = std::min(n - 1, pos + b);
      if (cfg.mode == TrainMode::Cbow) {
        sample.inputs.clear();
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c != pos) sample.inputs.push_back(ids[c]);
        }
        if (sample.inputs.empty()) continue;
        sample.positive = ids[pos];
        draw_negatives(st, rng, sample.positive, sample.negatives);
        res.loss += sgd_update(sample, st.input, st.output, flr, ws, k);
        ++res.samples;
      } else {
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c == pos) continue;
          sample.inputs.assign(1, ids[pos]);
          sample.positive = ids[c];
          draw_negatives(st, rng, sample.positive, sample.negatives);
          res.loss += sgd_update(sample, st.input, st.output, flr, ws, k);
          ++res.samples;
        }
      }
    }
  });
  return res;
}

void check_finite(const Matrix<float>& m, const char* which, const Vocabulary& vocab, std::size_t epoch) {
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    if (!std::isfinite(m.data[i])) {
      const std::size_t r = i / m.cols;
      throw NumericalError("epoch " + std::to_string(epoch + 1) + ": non-finite value in " + which +
                           " vector of '" + vocab[r].token + "' (row " + std::to_string(r) + ", component " +
                           std::to_string(i % m.cols) + "); lower the learning rate");
    }
  }
}

}  // namespace

TrainedModel train(const Corpus& corpus, const Vocabulary& vocab, const TrainConfig& config,
                   const AnchorSet& anchors) {
  config.validate();
  if (vocab.empty()) throw EmptyVocabularyError("cannot train '" + corpus.language() + "' on an empty vocabulary");

  TrainedModel model;
  model.language = corpus.language();
  model.vocab = vocab;
  std::tie(model.input, model.output) = init_weights(vocab, config, anchors);
  if (config.epochs == 0) return model;

  const UnigramTable table(vocab, config.unigram_exponent, config.table_size);
  std::vector<double> keep(vocab.size(), 1.0);
  double expected = 0.0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (config.subsample_threshold > 0.0) {
      keep[i] = keep_probability(vocab[i].count, vocab.retained_tokens(), config.subsample_threshold);
    }
    expected += keep[i] * static_cast<double>(vocab[i].count);
  }
  expected = std::max(1.0, expected * static_cast<double>(config.epochs));

  SharedState st{corpus, vocab, config, table, keep, model.input, model.output, expected};
  const std::uint64_t bytes = corpus.size_bytes();
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(config.threads, bytes));

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<WorkerResult> results(workers);
    if (workers == 1) {
      results[0] = run_worker(st, epoch, 0, 0, UINT64_MAX);
    } else {
      // Hogwild: workers update the shared matrices without synchronization.
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(workers);
      for (std::size_t w = 0; w < workers; ++w) {
        const std::uint64_t begin = bytes * w / workers;
        const std::uint64_t end = w + 1 == workers ? UINT64_MAX : bytes * (w + 1) / workers;
        pool.emplace_back([&, w, begin, end] {
          try {
            results[w] = run_worker(st, epoch, w, begin, end);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    double loss = 0.0;
    std::uint64_t samples = 0;
    for (const auto& r : results) {
      loss += r.loss;
      samples += r.samples;
    }
    check_finite(model.input, "input", vocab, epoch);
    check_finite(model.output, "output", vocab, epoch);
    model.epoch_loss.push_back(samples ? loss / static_cast<double>(samples) : 0.0);
    spdlog::debug("train[{}] epoch {}/{}: mean loss {:.4f} over {} samples", model.language, epoch + 1,
                  config.epochs, model.epoch_loss.back(), samples);
  }
  model.words_processed = st.processed.load();
  return model;
}

EmbeddingSpace to_space(const TrainedModel& model) {
  EmbeddingSpace space(model.input.cols);
  space.reserve(model.vocab.size());
  for (std::size_t i = 0; i < model.vocab.size(); ++i) {
    space.add(model.language, model.vocab[i].token, model.input.row(i));
  }
  return space;
}

}  // namespace chainmwe
