#include "chainmwe/chain.hpp"

#include <chrono>
#include <fstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "chainmwe/error.hpp"
#include "chainmwe/hash.hpp"

namespace chainmwe {

namespace {

std::optional<Lexicon> load_direct(const ChainConfig& config, const std::string& from, const std::string& to) {
  std::optional<Lexicon> out;
  for (const auto& lx : config.lexicons) {
    Lexicon loaded;
    if (lx.first == from && lx.second == to) {
      loaded = load_lexicon(lx.path, from, to);
    } else if (lx.first == to && lx.second == from) {
      loaded = load_lexicon(lx.path, to, from).inverted();
    } else {
      continue;
    }
    if (!out) {
      out = std::move(loaded);
    } else {
      out->pairs.merge(loaded.pairs);
    }
  }
  return out;
}

TrainConfig step_train_config(const ChainConfig& config, std::size_t step, const ChainRunOptions& options) {
  TrainConfig t = config.language(config.languages[step - 1]).train;
  t.seed = mix_seed(config.seed, step);
  if (options.threads) t.threads = *options.threads;
  return t;
}

Corpus open_corpus(const ChainConfig& config, const std::string& lang) {
  const auto& s = config.language(lang);
  Corpus c = Corpus::from_file(lang, s.corpus);
  c.set_lowercase(s.lowercase);
  return c;
}

// Cache key for the source-language space: corpus bytes plus every setting
// that influences its training.
std::string source_cache_key(const ChainConfig& config, const TrainConfig& t) {
  const auto& lang = config.languages.front();
  const auto& s = config.language(lang);
  Fnv1a h;
  h.update(lang).update(hash_file(s.corpus));
  h.update(std::uint64_t{t.dim}).update(std::uint64_t{t.window}).update(std::uint64_t{t.epochs});
  h.update(std::uint64_t{t.negatives}).update(std::uint64_t(t.mode == TrainMode::Cbow));
  h.update(t.initial_lr).update(t.min_lr).update(t.subsample_threshold).update(t.unigram_exponent);
  h.update(std::uint64_t{t.table_size}).update(t.seed);
  h.update(s.vocab.min_count).update(std::uint64_t{s.vocab.max_vocab}).update(std::uint64_t(s.lowercase));
  // Parallel runs are not reproducible, so they never share a cache entry.
  h.update(std::uint64_t{t.threads});
  return h.hex();
}

}  // namespace

const StepRecord& ChainReport::step(const std::string& lang) const {
  for (const auto& s : steps) {
    if (s.language == lang) return s;
  }
  throw ConfigError("report has no step for '" + lang + "'");
}

std::optional<Lexicon> resolve_lexicon(const ChainConfig& config, const std::string& from, const std::string& to) {
  if (auto direct = load_direct(config, from, to)) return direct;
  const std::string& hub = config.languages.front();
  if (from == hub || to == hub) return std::nullopt;
  auto hub_from = load_direct(config, hub, from);
  auto hub_to = load_direct(config, hub, to);
  if (!hub_from || !hub_to) return std::nullopt;
  Lexicon derived = pivot(*hub_from, *hub_to);
  spdlog::info("derived lexicon {}-{} by pivoting through {}: {} pairs", from, to, hub, derived.size());
  return derived;
}

std::vector<Lexicon> step_lexicons(const ChainConfig& config, std::size_t step) {
  if (step < 2 || step > config.languages.size()) throw ConfigError("invalid chain step " + std::to_string(step));
  const std::string& cur = config.languages[step - 1];
  std::vector<Lexicon> out;
  const std::size_t first = config.accumulate ? 0 : step - 2;
  for (std::size_t k = first; k + 1 < step; ++k) {
    if (auto lex = resolve_lexicon(config, config.languages[k], cur)) out.push_back(std::move(*lex));
  }
  return out;
}

std::filesystem::path checkpoint_path(const ChainConfig& config, std::size_t step) {
  return config.checkpoint_dir / ("M" + std::to_string(step) + "-" + config.languages.at(step - 1) + ".vec");
}

std::pair<EmbeddingSpace, ChainReport> run_chain(const ChainConfig& config, const ChainRunOptions& options) {
  const auto issues = validate(config);
  for (const auto& i : issues) {
    if (i.severity == ConfigIssue::Severity::Warning) spdlog::warn("{}", i.message);
  }
  if (has_errors(issues)) {
    std::string msg = "invalid chain configuration:";
    for (const auto& i : issues) {
      if (i.severity == ConfigIssue::Severity::Error) msg += "\n  - " + i.message;
    }
    throw ConfigError(msg);
  }
  const auto& langs = config.languages;
  const std::size_t n = langs.size();
  const std::size_t start = options.resume_from == 0 ? 1 : options.resume_from;
  if (start < 1 || start > n) {
    throw ConfigError("--resume-from must lie in 1.." + std::to_string(n) + ", got " + std::to_string(start));
  }

  // All seed lexicons are resolved up front so bad dictionaries fail before
  // any training starts.
  std::vector<MultiSourceLexicon> seeds(n + 1);
  std::vector<std::vector<std::string>> seed_sources(n + 1);
  for (std::size_t step = std::max<std::size_t>(2, start); step <= n; ++step) {
    auto lexicons = step_lexicons(config, step);
    if (lexicons.empty()) throw ConfigError("no seed lexicon available for '" + langs[step - 1] + "'");
    for (const auto& l : lexicons) seed_sources[step].push_back(l.src_lang);
    seeds[step] = accumulate(lexicons, langs[step - 1]);
  }

  std::filesystem::create_directories(config.checkpoint_dir);
  ChainReport report;
  EmbeddingSpace space;

  if (start == 1) {
    const TrainConfig t = step_train_config(config, 1, options);
    const auto cache = config.checkpoint_dir / ("source-" + source_cache_key(config, t) + ".vec");
    if (t.threads == 1 && std::filesystem::exists(cache)) {
      spdlog::info("step 1 ({}): reusing cached source space {}", langs[0], cache.string());
      space = load_text(cache);
      report.reused_cached_source = true;
    } else {
      spdlog::info("step 1 ({}): training monolingual source space", langs[0]);
      const Corpus corpus = open_corpus(config, langs[0]);
      const Vocabulary vocab = build_vocab(corpus, config.language(langs[0]).vocab);
      space = to_space(train(corpus, vocab, t, AnchorSet{}));
      if (t.threads == 1) save_text(space, cache);
    }
    save_text(space, checkpoint_path(config, 1));
  } else {
    const auto ckpt = checkpoint_path(config, start - 1);
    if (!std::filesystem::exists(ckpt)) throw IoError("checkpoint " + ckpt.string() + " not found; cannot resume");
    space = load_text(ckpt);
    const std::set<std::string> expected(langs.begin(), langs.begin() + static_cast<std::ptrdiff_t>(start - 1));
    if (space.languages() != expected) {
      throw ConfigError("checkpoint " + ckpt.string() + " does not hold exactly the first " +
                        std::to_string(start - 1) + " chain languages");
    }
    report.resumed_from = start;
    spdlog::info("resuming at step {} from {}", start, ckpt.string());
  }

  for (std::size_t step = std::max<std::size_t>(2, start); step <= n; ++step) {
    const std::string& lang = langs[step - 1];
    const auto t0 = std::chrono::steady_clock::now();
    const TrainConfig t = step_train_config(config, step, options);
    if (t.dim != space.dim()) {
      throw DimensionError("step " + std::to_string(step) + " (" + lang + "): dim " + std::to_string(t.dim) +
                           " differs from the multilingual space dim " + std::to_string(space.dim()));
    }
    StepRecord rec;
    rec.step = step;
    rec.language = lang;
    rec.lexicon_pairs = seeds[step].size();
    rec.lexicon_sources = seed_sources[step];
    try {
      const Corpus corpus = open_corpus(config, lang);
      const Vocabulary vocab = build_vocab(corpus, config.language(lang).vocab);
      const AnchorSet anchors = build_anchor_set(space, seeds[step], vocab);
      const TrainedModel model = train(corpus, vocab, t, anchors);
      space = concat(space, to_space(model));
      rec.vocab_size = vocab.size();
      rec.anchor_pairs = anchors.pair_count();
      rec.anchored_words = anchors.anchored_words();
      rec.dropped = anchors.dropped;
      rec.epochs = t.epochs;
      rec.final_loss = model.epoch_loss.empty() ? 0.0 : model.epoch_loss.back();
    } catch (const NumericalError& e) {
      throw NumericalError("step " + std::to_string(step) + " (" + lang + "): " + e.what());
    } catch (const EmptyVocabularyError& e) {
      throw EmptyVocabularyError("step " + std::to_string(step) + " (" + lang + "): " + e.what());
    } catch (const DimensionError& e) {
      throw DimensionError("step " + std::to_string(step) + " (" + lang + "): " + e.what());
    }
    rec.checkpoint = checkpoint_path(config, step);
    save_text(space, rec.checkpoint);
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    spdlog::info("step {} ({}): vocab {}, {} anchor pairs on {} words, {:.2f}s", step, lang, rec.vocab_size,
                 rec.anchor_pairs, rec.anchored_words, rec.seconds);
    report.steps.push_back(std::move(rec));
  }

  report.final_space = config.output.value_or(checkpoint_path(config, n));
  if (config.output) save_text(space, *config.output);
  write_report_json(report, config.checkpoint_dir / "chain-report.json");
  return {std::move(space), std::move(report)};
}

// Deterministic summary: wall times and cache use live in the JSON report.
void write_report_text(const ChainReport& report, std::ostream& out) {
  if (report.resumed_from) out << "resumed from step " << report.resumed_from << '\n';
  out << "step\tlanguage\tvocab\tanchor_pairs\tanchored_words\tdropped\tepochs\tloss\n";
  for (const auto& s : report.steps) {
    char loss[32];
    std::snprintf(loss, sizeof loss, "%.4f", s.final_loss);
    out << s.step << '\t' << s.language << '\t' << s.vocab_size << '\t' << s.anchor_pairs << '\t'
        << s.anchored_words << '\t' << s.dropped.total() << '\t' << s.epochs << '\t' << loss << '\n';
  }
  out << "final_space\t" << report.final_space.string() << '\n';
}

void write_report_json(const ChainReport& report, const std::filesystem::path& path) {
  nlohmann::json j;
  j["final_space"] = report.final_space.string();
  j["resumed_from"] = report.resumed_from;
  j["reused_cached_source"] = report.reused_cached_source;
  j["steps"] = nlohmann::json::array();
  for (const auto& s : report.steps) {
    j["steps"].push_back({{"step", s.step},
                          {"language", s.language},
                          {"vocab_size", s.vocab_size},
                          {"lexicon_pairs", s.lexicon_pairs},
                          {"lexicon_sources", s.lexicon_sources},
                          {"anchor_pairs", s.anchor_pairs},
                          {"anchored_words", s.anchored_words},
                          {"dropped_source_oov", s.dropped.source_oov},
                          {"dropped_target_oov", s.dropped.target_oov},
                          {"dropped_both_oov", s.dropped.both_oov},
                          {"epochs", s.epochs},
                          {"final_loss", s.final_loss},
                          {"seconds", s.seconds},
                          {"checkpoint", s.checkpoint.string()}});
  }
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

}  // namespace chainmwe
