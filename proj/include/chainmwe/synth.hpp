#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "chainmwe/lexicon.hpp"

namespace chainmwe {

// One synthetic language. It is derived from `parent` (another language listed
// earlier, or the hidden base corpus when empty) by re-randomizing the
// contexts of a `noise` fraction of token types, then renamed with a private
// bijection.
struct SynthLanguage {
  std::string id;
  double noise = 0.0;  // 0 = exact relabeling, 1 = unrelated resample
  std::string parent;
};

struct SynthSpec {
  std::size_t vocab_size = 1000;
  std::size_t corpus_tokens = 100'000;
  double zipf_exponent = 1.0;
  std::vector<SynthLanguage> languages;
  std::uint64_t seed = 1;

  double bigram_weight = 0.7;  // remainder is drawn from the unigram model
  std::size_t successors = 8;  // bigram fan-out per type
  // Successors are drawn with weight rank^-successor_exponent; 0 spreads
  // them uniformly so every type gets a distinctive context.
  double successor_exponent = 0.0;
  std::size_t min_sentence = 8;
  std::size_t max_sentence = 24;

  void validate() const;
};

struct SynthCorpus {
  std::string language;
  std::string text;  // one sentence per line
  // Underlying type id of each token, sentence by sentence (for tests).
  std::vector<std::vector<std::uint32_t>> types;
};

struct SynthOutput {
  std::vector<SynthCorpus> corpora;  // in listed order
  // Gold bijection for every language pair (i < j in listed order).
  std::vector<Lexicon> gold;
  // Surface form of base type t in language l: names[l][t].
  std::vector<std::vector<std::string>> names;
  // Types whose context was re-randomized relative to the parent.
  std::vector<std::vector<bool>> perturbed;

  const Lexicon& gold_between(const std::string& a, const std::string& b) const;
};

SynthOutput generate(const SynthSpec& spec);

// Writes <dir>/<lang>.txt for every corpus and <dir>/<a>-<b>.dict for every
// gold lexicon.
void write_synth(const SynthOutput& out, const std::filesystem::path& dir);

}  // namespace chainmwe
