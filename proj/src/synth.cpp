#include "chainmwe/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>

#include "chainmwe/error.hpp"
#include "chainmwe/hash.hpp"

namespace chainmwe {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Inverse-CDF sampler over a fixed discrete distribution.
class Discrete {
 public:
  Discrete() = default;
  explicit Discrete(const std::vector<double>& weights) : cdf_(weights.size()) {
    std::partial_sum(weights.begin(), weights.end(), cdf_.begin());
    for (double& c : cdf_) c /= cdf_.back();
  }
  std::size_t operator()(std::mt19937_64& rng) const {
    const double u = uniform01(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }
  bool empty() const { return cdf_.empty(); }

 private:
  std::vector<double> cdf_;
};

using TypeSeq = std::vector<std::vector<std::uint32_t>>;

TypeSeq sample_base(const SynthSpec& spec, const std::vector<double>& zipf, std::mt19937_64& rng) {
  const std::size_t v = spec.vocab_size;
  const Discrete unigram(zipf);
  std::vector<double> succ_weight(v);
  for (std::size_t r = 0; r < v; ++r) succ_weight[r] = std::pow(static_cast<double>(r + 1), -spec.successor_exponent);
  const Discrete successor(succ_weight);
  std::vector<std::vector<std::uint32_t>> succ(v);
  std::vector<Discrete> succ_dist(v);
  for (std::size_t a = 0; a < v; ++a) {
    std::vector<double> w(spec.successors);
    for (std::size_t j = 0; j < spec.successors; ++j) {
      succ[a].push_back(static_cast<std::uint32_t>(successor(rng)));
      w[j] = 0.1 + uniform01(rng);
    }
    succ_dist[a] = Discrete(w);
  }
  TypeSeq out;
  std::size_t produced = 0;
  while (produced < spec.corpus_tokens) {
    std::size_t len = spec.min_sentence + rng() % (spec.max_sentence - spec.min_sentence + 1);
    len = std::min(len, spec.corpus_tokens - produced);
    std::vector<std::uint32_t> sent;
    sent.reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
      std::uint32_t t;
      if (i > 0 && uniform01(rng) < spec.bigram_weight) {
        t = succ[sent.back()][succ_dist[sent.back()](rng)];
      } else {
        t = static_cast<std::uint32_t>(unigram(rng));
      }
      sent.push_back(t);
    }
    produced += len;
    out.push_back(std::move(sent));
  }
  return out;
}

// Every occurrence of a perturbed type is replaced by an independent draw
// from the unigram model restricted to the perturbed set, which detaches
// those types from their original contexts.
TypeSeq derive(const TypeSeq& parent, double noise, const std::vector<double>& zipf, std::mt19937_64& rng,
               std::vector<bool>& perturbed) {
  const std::size_t v = zipf.size();
  perturbed.assign(v, false);
  std::vector<std::uint32_t> members;
  std::vector<double> weights;
  for (std::size_t t = 0; t < v; ++t) {
    if (uniform01(rng) < noise) {
      perturbed[t] = true;
      members.push_back(static_cast<std::uint32_t>(t));
      weights.push_back(zipf[t]);
    }
  }
  if (members.empty()) return parent;
  const Discrete pick(weights);
  TypeSeq out = parent;
  for (auto& sent : out) {
    for (auto& t : sent) {
      if (perturbed[t]) t = members[pick(rng)];
    }
  }
  return out;
}

}  // namespace

void SynthSpec::validate() const {
  if (vocab_size < 10) throw ConfigError("synthetic vocab_size must be >= 10");
  if (corpus_tokens < 1) throw ConfigError("corpus_tokens must be positive");
  if (languages.empty()) throw ConfigError("at least one synthetic language is required");
  if (bigram_weight < 0.0 || bigram_weight > 1.0) throw ConfigError("bigram_weight must lie in [0,1]");
  if (successors < 1) throw ConfigError("successors must be >= 1");
  if (min_sentence < 1 || max_sentence < min_sentence) throw ConfigError("invalid sentence length range");
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < languages.size(); ++i) {
    const auto& l = languages[i];
    check_language_id(l.id);
    if (!(l.noise >= 0.0 && l.noise <= 1.0)) throw ConfigError("noise of '" + l.id + "' must lie in [0,1]");
    if (!l.parent.empty() && !seen.contains(l.parent)) {
      throw ConfigError("parent '" + l.parent + "' of '" + l.id + "' must be listed before it");
    }
    if (!seen.emplace(l.id, i).second) throw ConfigError("duplicate synthetic language '" + l.id + "'");
  }
}

const Lexicon& SynthOutput::gold_between(const std::string& a, const std::string& b) const {
  for (const auto& g : gold) {
    if (g.src_lang == a && g.trg_lang == b) return g;
  }
  throw ConfigError("no gold lexicon " + a + "-" + b);
}

SynthOutput generate(const SynthSpec& spec) {
  spec.validate();
  const std::size_t v = spec.vocab_size;
  std::vector<double> zipf(v);
  for (std::size_t r = 0; r < v; ++r) zipf[r] = 1.0 / std::pow(static_cast<double>(r + 1), spec.zipf_exponent);

  std::mt19937_64 rng(mix_seed(spec.seed, 0x5e7));
  const TypeSeq base = sample_base(spec, zipf, rng);

  SynthOutput out;
  std::map<std::string, std::size_t> index;
  std::vector<TypeSeq> seqs;
  for (std::size_t i = 0; i < spec.languages.size(); ++i) {
    const auto& lang = spec.languages[i];
    std::mt19937_64 lrng(mix_seed(spec.seed, 0x100 + i));
    const TypeSeq& parent = lang.parent.empty() ? base : seqs[index.at(lang.parent)];
    std::vector<bool> perturbed;
    seqs.push_back(derive(parent, lang.noise, zipf, lrng, perturbed));
    index[lang.id] = i;

    // Private surface forms: a random bijection type -> "w<k>".
    std::vector<std::uint32_t> perm(v);
    std::iota(perm.begin(), perm.end(), 0u);
    std::shuffle(perm.begin(), perm.end(), lrng);
    std::vector<std::string> names(v);
    for (std::size_t t = 0; t < v; ++t) names[t] = "w" + std::to_string(perm[t]);

    SynthCorpus corpus{lang.id, {}, seqs.back()};
    for (const auto& sent : seqs.back()) {
      for (std::size_t j = 0; j < sent.size(); ++j) {
        if (j) corpus.text.push_back(' ');
        corpus.text += names[sent[j]];
      }
      corpus.text.push_back('\n');
    }
    out.corpora.push_back(std::move(corpus));
    out.names.push_back(std::move(names));
    out.perturbed.push_back(std::move(perturbed));
  }
  for (std::size_t a = 0; a < spec.languages.size(); ++a) {
    for (std::size_t b = a + 1; b < spec.languages.size(); ++b) {
      Lexicon lex{spec.languages[a].id, spec.languages[b].id, {}};
      for (std::size_t t = 0; t < v; ++t) lex.pairs.emplace(out.names[a][t], out.names[b][t]);
      out.gold.push_back(std::move(lex));
    }
  }
  return out;
}

void write_synth(const SynthOutput& out, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& c : out.corpora) {
    const auto path = dir / (c.language + ".txt");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    f << c.text;
    if (!f) throw IoError("write failed for " + path.string());
  }
  for (const auto& g : out.gold) save_lexicon(g, dir / (g.src_lang + "-" + g.trg_lang + ".dict"));
}

}  // namespace chainmwe
