#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "chainmwe/corpus.hpp"
#include "chainmwe/embedding.hpp"
#include "chainmwe/lexicon.hpp"
#include "chainmwe/trainer.hpp"

namespace chainmwe {

struct LanguageSettings {
  std::filesystem::path corpus;
  TrainConfig train;
  VocabSettings vocab;
  bool lowercase = false;
};

// A dictionary file; `first` is the language of its left column.
struct LexiconSource {
  std::string first;
  std::string second;
  std::filesystem::path path;
};

// Ordered language chain c_1 .. c_n (source first, target last).
struct ChainConfig {
  std::vector<std::string> languages;
  std::map<std::string, LanguageSettings> settings;
  std::vector<LexiconSource> lexicons;
  bool accumulate = true;
  std::filesystem::path checkpoint_dir = "checkpoints";
  std::optional<std::filesystem::path> output;
  std::uint64_t seed = 1;

  const LanguageSettings& language(const std::string& lang) const;
  // Stable digest of everything that influences the result.
  std::string hash() const;
};

// Reads the INI-style chain file. Relative paths resolve against the file's
// directory. Throws IoError / ParseError / ConfigError.
ChainConfig load_chain_config(const std::filesystem::path& path);

struct ConfigIssue {
  enum class Severity { Error, Warning };
  Severity severity;
  std::string message;
};

// Empty result (or warnings only) means the chain is runnable.
std::vector<ConfigIssue> validate(const ChainConfig& config);
bool has_errors(const std::vector<ConfigIssue>& issues);

struct StepRecord {
  std::size_t step = 0;  // 1-based chain position
  std::string language;
  std::size_t vocab_size = 0;
  std::size_t anchor_pairs = 0;
  std::size_t anchored_words = 0;
  std::size_t lexicon_pairs = 0;  // |L_i| before vocabulary restriction
  DropReport dropped;
  std::size_t epochs = 0;
  double final_loss = 0.0;
  double seconds = 0.0;
  std::vector<std::string> lexicon_sources;  // languages contributing to L_i
  std::filesystem::path checkpoint;
};

struct ChainReport {
  std::vector<StepRecord> steps;  // one per language after c_1
  std::filesystem::path final_space;
  std::size_t resumed_from = 0;   // 0 unless a checkpoint was used
  bool reused_cached_source = false;

  const StepRecord& step(const std::string& lang) const;
};

struct ChainRunOptions {
  // Start at this 1-based step, loading M_{step-1} from its checkpoint.
  std::size_t resume_from = 0;
  std::optional<std::size_t> threads;
};

// Lexicon l_{k,i} oriented from `from` to `to`: a direct file if one exists,
// otherwise pivoted through c_1. nullopt when neither is possible.
std::optional<Lexicon> resolve_lexicon(const ChainConfig& config, const std::string& from, const std::string& to);

// Seed lexicons feeding step `step` (1-based, >= 2): every earlier language
// when accumulating, only the preceding one otherwise.
std::vector<Lexicon> step_lexicons(const ChainConfig& config, std::size_t step);

std::filesystem::path checkpoint_path(const ChainConfig& config, std::size_t step);

std::pair<EmbeddingSpace, ChainReport> run_chain(const ChainConfig& config, const ChainRunOptions& options = {});

void write_report_text(const ChainReport& report, std::ostream& out);
void write_report_json(const ChainReport& report, const std::filesystem::path& path);

}  // namespace chainmwe
