#include <doctest.h>

#include <cmath>
#include <random>

#include "chainmwe/error.hpp"
#include "chainmwe/synth.hpp"
#include "chainmwe/trainer.hpp"
#include "experiments.hpp"

using namespace chainmwe;

namespace {

Vocabulary vocab_of(const std::string& text) { return build_vocab(Corpus::from_text("xx", text), 1, 1000); }

std::string repeat(const std::string& w, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += w + " ";
  return s;
}

const std::string& small_corpus() {
  static const std::string text = [] {
    SynthSpec spec;
    spec.vocab_size = 100;
    spec.corpus_tokens = 8000;
    spec.seed = 3;
    spec.languages = {{"xx", 0.0, ""}};
    return generate(spec).corpora[0].text;
  }();
  return text;
}

TrainConfig quick(std::uint64_t seed) {
  TrainConfig t = testing::small_train_config(seed);
  t.dim = 16;
  t.epochs = 3;
  t.table_size = 100'000;
  return t;
}

}  // namespace

TEST_CASE("anchor set from a single pair") {
  EmbeddingSpace prev(2);
  prev.add("eng", "dog", std::vector<float>{0.25f, -1.0f});
  const MultiSourceLexicon lex{"kaz", {{"eng:dog", "it"}}};

  const AnchorSet a = build_anchor_set(prev, lex, vocab_of("it it mysyq"));
  REQUIRE(a.anchored_words() == 1);
  CHECK(a.anchors.at("it") == std::vector<std::vector<float>>{{0.25f, -1.0f}});
  CHECK(a.pair_count() == 1);

  const AnchorSet none = build_anchor_set(prev, lex, vocab_of("mysyq"));
  CHECK(none.empty());
  CHECK(none.dropped.target_oov == 1);
  CHECK(none.dropped.total() == 1);
}

TEST_CASE("a word paired with two source languages gets both anchors") {
  EmbeddingSpace prev(2);
  prev.add("eng", "book", std::vector<float>{1, 0});
  prev.add("rus", "книга", std::vector<float>{0, 1});
  prev.add("rus", "дом", std::vector<float>{3, 3});
  const auto lex = accumulate({{"eng", "kaz", {{"book", "kitap"}, {"house", "üi"}}},
                               {"rus", "kaz", {{"книга", "kitap"}, {"дом", "üi"}}}},
                              "kaz");
  const Vocabulary v = vocab_of("kitap üi");
  const AnchorSet a = build_anchor_set(prev, lex, v);
  // Brute-force scan over the lexicon.
  std::map<std::string, std::size_t> want;
  for (const auto& [src, trg] : lex.pairs) want[trg] += prev.contains(src) && v.contains(trg);
  for (const auto& [w, n] : want) CHECK(a.anchors.at(w).size() == n);
  CHECK(a.anchors.at("kitap").size() == 2);
  CHECK(a.dropped.source_oov == 1);
}

TEST_CASE("anchored rows start at the anchor mean") {
  const Vocabulary v = vocab_of("a b c");
  TrainConfig cfg;
  cfg.dim = 2;
  AnchorSet anchors;
  anchors.dim = 2;
  anchors.anchors["a"] = {{1.0f, 0.0f}, {0.0f, 1.0f}};
  anchors.anchors["b"] = {{0.1f, -7.3e-5f}};
  const auto [in, out] = init_weights(v, cfg, anchors);
  const auto a = in.row(*v.find("a"));
  CHECK(a[0] == 0.5f);
  CHECK(a[1] == 0.5f);
  const auto b = in.row(*v.find("b"));
  CHECK(b[0] == 0.1f);
  CHECK(b[1] == -7.3e-5f);
  for (float x : out.data) CHECK(x == 0.0f);

  anchors.dim = 3;
  CHECK_THROWS_AS(init_weights(v, cfg, anchors), DimensionError);
}

TEST_CASE("random init is bounded and seeded") {
  std::string text;
  for (int i = 0; i < 100; ++i) text += "w" + std::to_string(i) + " ";
  const Vocabulary v = vocab_of(text);
  TrainConfig cfg;
  cfg.dim = 10;
  cfg.seed = 42;
  const auto [a, ao] = init_weights(v, cfg, {});
  const auto [b, bo] = init_weights(v, cfg, {});
  CHECK(a.data == b.data);
  double lo = 1, hi = -1;
  for (float x : a.data) {
    CHECK(x >= -0.05f);
    CHECK(x <= 0.05f);
    lo = std::min(lo, double(x));
    hi = std::max(hi, double(x));
  }
  CHECK(lo < -0.04);
  CHECK(hi > 0.04);
  cfg.seed = 43;
  CHECK(init_weights(v, cfg, {}).first.data != a.data);
}

TEST_CASE("unigram table shares") {
  const std::size_t size = 100'001;
  const Vocabulary even = vocab_of("a b");
  const UnigramTable t1(even, 0.75, size);
  CHECK(std::fabs(double(t1.share(0)) - size / 2.0) <= 1.0);
  CHECK(t1.share(0) + t1.share(1) == size);

  const Vocabulary skew = vocab_of(repeat("a", 8) + "b");
  const UnigramTable t2(skew, 0.75, size);
  const double pa = std::pow(8.0, 0.75) / (std::pow(8.0, 0.75) + 1.0);
  CHECK(std::fabs(double(t2.share(0)) - size * pa) <= 1.0);
  CHECK(double(t2.share(0)) / double(t2.share(1)) == doctest::Approx(4.757).epsilon(1e-3));

  const UnigramTable t3(vocab_of(repeat("a", 50) + repeat("b", 3) + "c"), 0.0, 30'000);
  for (std::uint32_t w = 0; w < 3; ++w) CHECK(std::fabs(double(t3.share(w)) - 10'000.0) <= 1.0);
}

TEST_CASE("unigram table shares stay within one slot on random vocabularies") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    std::string text;
    for (int w = 0; w < 40; ++w) text += repeat("w" + std::to_string(w), int(rng() % 30) + 1);
    const Vocabulary v = vocab_of(text);
    const std::size_t size = 50'000 + rng() % 1000;
    const UnigramTable t(v, 0.75, size);
    double z = 0;
    for (std::size_t i = 0; i < v.size(); ++i) z += std::pow(double(v[i].count), 0.75);
    for (std::uint32_t i = 0; i < v.size(); ++i) {
      CHECK(std::fabs(double(t.share(i)) - size * std::pow(double(v[i].count), 0.75) / z) <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("single-threaded training is bit-reproducible") {
  const Corpus c = Corpus::from_text("xx", small_corpus());
  const Vocabulary v = build_vocab(c, 3, 1000);
  const auto a = train(c, v, quick(5), {});
  const auto b = train(c, v, quick(5), {});
  CHECK(a.input.data == b.input.data);
  CHECK(a.output.data == b.output.data);
  CHECK(a.epoch_loss == b.epoch_loss);
  CHECK(train(c, v, quick(6), {}).input.data != a.input.data);
}

TEST_CASE("zero epochs returns the initialization") {
  const Corpus c = Corpus::from_text("xx", small_corpus());
  const Vocabulary v = build_vocab(c, 3, 1000);
  TrainConfig cfg = quick(7);
  cfg.epochs = 0;
  AnchorSet anchors;
  anchors.dim = cfg.dim;
  anchors.anchors[v[0].token] = {std::vector<float>(cfg.dim, 0.125f), std::vector<float>(cfg.dim, 0.375f)};
  const auto m = train(c, v, cfg, anchors);
  CHECK(m.input.data == init_weights(v, cfg, anchors).first.data);
  for (float x : m.input.row(0)) CHECK(x == 0.25f);
  CHECK(m.epoch_loss.empty());
}

TEST_CASE("loss goes down") {
  const Corpus c = Corpus::from_text("xx", small_corpus());
  const Vocabulary v = build_vocab(c, 3, 1000);
  for (TrainMode mode : {TrainMode::Cbow, TrainMode::SkipGram}) {
    TrainConfig cfg = quick(8);
    cfg.mode = mode;
    cfg.epochs = 4;
    const auto m = train(c, v, cfg, {});
    REQUIRE(m.epoch_loss.size() == 4);
    for (std::size_t e = 1; e < 4; ++e) CHECK(m.epoch_loss[e] <= m.epoch_loss[0]);
    for (float x : m.input.data) REQUIRE(std::isfinite(x));
  }
}

TEST_CASE("the source space is only read") {
  const Corpus c = Corpus::from_text("xx", small_corpus());
  const Vocabulary v = build_vocab(c, 3, 1000);
  EmbeddingSpace prev(16);
  for (std::size_t i = 0; i < 20; ++i) prev.add("src", v[i].token, std::vector<float>(16, float(i) * 0.01f));
  const std::vector<float> before(prev.data().begin(), prev.data().end());
  MultiSourceLexicon lex{"xx", {}};
  for (std::size_t i = 0; i < 20; ++i) lex.pairs.emplace("src:" + v[i].token, v[i].token);
  const AnchorSet anchors = build_anchor_set(prev, lex, v);
  train(c, v, quick(9), anchors);
  CHECK(std::equal(before.begin(), before.end(), prev.data().begin(), prev.data().end()));
}

TEST_CASE("parallel training stays finite") {
  const Corpus c = Corpus::from_text("xx", small_corpus());
  const Vocabulary v = build_vocab(c, 3, 1000);
  TrainConfig cfg = quick(10);
  cfg.threads = 4;
  const auto m = train(c, v, cfg, {});
  for (float x : m.input.data) REQUIRE(std::isfinite(x));
  CHECK(m.words_processed > 0);
}

TEST_CASE("training errors") {
  const Corpus c = Corpus::from_text("xx", small_corpus());
  const Vocabulary v = build_vocab(c, 3, 1000);
  CHECK_THROWS_AS(train(c, Vocabulary{}, quick(1), {}), EmptyVocabularyError);
  TrainConfig bad = quick(1);
  bad.initial_lr = 1e30;
  bad.min_lr = 1e29;
  CHECK_THROWS_AS(train(c, v, bad, {}), NumericalError);
  TrainConfig zero = quick(1);
  zero.dim = 0;
  CHECK_THROWS_AS(zero.validate(), ConfigError);
  CHECK(parse_train_mode("sg") == TrainMode::SkipGram);
  CHECK_THROWS_AS(parse_train_mode("glove"), ConfigError);
}
