#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chainmwe/corpus.hpp"
#include "chainmwe/embedding.hpp"
#include "chainmwe/kernels.hpp"
#include "chainmwe/lexicon.hpp"

namespace chainmwe {

enum class TrainMode { Cbow, SkipGram };

std::string_view to_string(TrainMode mode);
TrainMode parse_train_mode(std::string_view s);  // "cbow" | "sg" | "skipgram"

struct TrainConfig {
  std::size_t dim = 300;
  std::size_t window = 5;  // maximum; the effective window is drawn per center word
  std::size_t epochs = 5;
  std::size_t negatives = 5;
  TrainMode mode = TrainMode::Cbow;
  double initial_lr = 0.025;
  double min_lr = 1e-4;
  double subsample_threshold = 1e-3;  // <= 0 disables subsampling
  double unigram_exponent = 0.75;
  std::size_t table_size = 10'000'000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  // Throws ConfigError on an invalid combination.
  void validate() const;
};

// Row-major dense matrix.
template <typename T>
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, T{}) {}

  std::span<T> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const T> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

// Anchor vectors per target word, copied out of the previous multilingual
// space. Several anchors per word are averaged at initialization.
struct AnchorSet {
  std::size_t dim = 0;
  std::map<std::string, std::vector<std::vector<float>>> anchors;
  DropReport dropped;

  std::size_t anchored_words() const noexcept { return anchors.size(); }
  std::size_t pair_count() const noexcept;
  bool empty() const noexcept { return anchors.empty(); }
};

AnchorSet build_anchor_set(const EmbeddingSpace& prev_space, const MultiSourceLexicon& lexicon,
                           const Vocabulary& trg_vocab);

struct TrainedModel {
  std::string language;
  Vocabulary vocab;
  Matrix<float> input;   // the embeddings
  Matrix<float> output;  // context layer
  std::vector<double> epoch_loss;  // mean SGNS loss per training sample
  std::uint64_t words_processed = 0;
};

// Input rows: anchored words get the componentwise mean of their anchors,
// everything else U[-0.5/dim, 0.5/dim) from the seeded generator. Output rows
// are zero.
std::pair<Matrix<float>, Matrix<float>> init_weights(const Vocabulary& vocab, const TrainConfig& config,
                                                      const AnchorSet& anchors);

// Negative-sampling table: word w occupies ~ table_size * count(w)^e / Z slots.
class UnigramTable {
 public:
  UnigramTable(const Vocabulary& vocab, double exponent, std::size_t table_size);

  std::size_t size() const noexcept { return slots_.size(); }
  std::uint32_t operator[](std::size_t i) const { return slots_[i]; }
  std::uint32_t draw(std::mt19937_64& rng) const { return slots_[rng() % slots_.size()]; }
  std::size_t share(std::uint32_t word) const;

 private:
  std::vector<std::uint32_t> slots_;
};

// One negative-sampling training sample. `inputs` are the rows averaged into
// the hidden vector h: the context window in CBOW, the center word alone in
// Skip-gram. `positive` and `negatives` index the output matrix.
struct SgnsSample {
  std::vector<std::uint32_t> inputs;
  std::uint32_t positive = 0;
  std::vector<std::uint32_t> negatives;
};

struct SgnsGradients {
  double loss = 0.0;
  std::vector<double> grad_h;
  std::map<std::uint32_t, std::vector<double>> input_grads;   // accumulated per input row
  std::map<std::uint32_t, std::vector<double>> output_grads;  // accumulated per output row
};

// Exact loss -log s(u_o.h) - sum_n log s(-u_n.h) and its gradients, in double.
SgnsGradients step_loss_and_grads(const SgnsSample& sample, const Matrix<double>& input,
                                  const Matrix<double>& output);

// Scratch buffers for sgd_update.
struct SgdWorkspace {
  std::vector<float> hidden;
  std::vector<float> grad;
  explicit SgdWorkspace(std::size_t dim) : hidden(dim), grad(dim) {}
};

// In-place SGD step with learning rate `lr` on the float matrices; returns
// the sample loss evaluated before the update.
double sgd_update(const SgnsSample& sample, Matrix<float>& input, Matrix<float>& output, float lr,
                  SgdWorkspace& ws, const kernels::KernelTable& k = kernels::active());

// Trains one language. Anchors only affect initialization; `anchors` may be
// empty (plain word2vec). Throws EmptyVocabularyError / NumericalError.
TrainedModel train(const Corpus& corpus, const Vocabulary& vocab, const TrainConfig& config,
                   const AnchorSet& anchors);

// Input vectors tagged with the model's language.
EmbeddingSpace to_space(const TrainedModel& model);

}  // namespace chainmwe
