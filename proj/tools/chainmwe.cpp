// chainmwe: command-line entry point.
//
// Exit codes: 0 success, 1 usage error, 2 data/format error, 3 numerical failure.
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "chainmwe/chain.hpp"
#include "chainmwe/corpus.hpp"
#include "chainmwe/error.hpp"
#include "chainmwe/eval.hpp"
#include "chainmwe/hash.hpp"
#include "chainmwe/kernels.hpp"
#include "chainmwe/lexicon.hpp"
#include "chainmwe/synth.hpp"
#include "chainmwe/trainer.hpp"

using namespace chainmwe;

namespace {

constexpr std::uint64_t kDefaultSeed = 20240601;

std::uint64_t resolve_seed(const std::string& s) {
  if (s == "random") return std::random_device{}() * 0x100000001ULL ^ std::random_device{}();
  std::uint64_t v = 0;
  std::istringstream in(s);
  if (!(in >> v) || !in.eof()) throw CLI::ValidationError("--seed", "expects an integer or 'random'");
  return v;
}

std::string header(const std::string& command, const std::string& config_hash, const std::string& seed) {
  return "# chainmwe " CHAINMWE_VERSION " " + command + " config_hash=" + config_hash + " seed=" + seed +
         " kernels=" + kernels::active().name;
}

std::string options_hash(const CLI::App& sub) { return Fnv1a().update(sub.config_to_str(true, false)).hex(); }

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw IoError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

struct TrainFlags {
  TrainConfig cfg;
  VocabSettings vocab;
  std::string mode = "cbow";
  std::string seed = std::to_string(kDefaultSeed);
  bool lowercase = false;

  void add_to(CLI::App* app) {
    app->add_option("--dim", cfg.dim, "Embedding dimensionality")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--window", cfg.window, "Maximum context window")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--epochs", cfg.epochs, "Training epochs")->capture_default_str();
    app->add_option("--negatives", cfg.negatives, "Negative samples")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--mode", mode, "cbow or sg")->capture_default_str()->check(CLI::IsMember({"cbow", "sg", "skipgram"}));
    app->add_option("--lr", cfg.initial_lr, "Initial learning rate")->capture_default_str();
    app->add_option("--min-lr", cfg.min_lr, "Final learning rate")->capture_default_str();
    app->add_option("--sample", cfg.subsample_threshold, "Subsampling threshold (0 disables)")->capture_default_str();
    app->add_option("--unigram-exponent", cfg.unigram_exponent)->capture_default_str();
    app->add_option("--table-size", cfg.table_size, "Negative-sampling table size")->capture_default_str();
    app->add_option("--min-count", vocab.min_count, "Minimum token frequency")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--max-vocab", vocab.max_vocab, "Maximum vocabulary size")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "Integer seed, or 'random'")->capture_default_str();
    app->add_option("--threads", cfg.threads, "Worker threads (1 = deterministic)")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_flag("--lowercase", lowercase, "ASCII-lowercase tokens");
  }
};

std::vector<std::size_t> parse_ks(const std::string& s) {
  std::vector<std::size_t> ks;
  std::stringstream in(s);
  for (std::string part; std::getline(in, part, ',');) {
    std::size_t pos = 0;
    std::size_t v = 0;
    try {
      v = std::stoul(part, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != part.size()) throw CLI::ValidationError("--k", "expects a comma-separated list, e.g. 1,5,10");
    ks.push_back(v);
  }
  return ks;
}

SynthLanguage parse_synth_language(const std::string& s) {
  // id[:noise[:parent]]
  SynthLanguage l;
  std::stringstream in(s);
  std::string part;
  std::getline(in, l.id, ':');
  if (std::getline(in, part, ':')) {
    try {
      l.noise = std::stod(part);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--lang", "bad noise in '" + s + "'");
    }
  }
  std::getline(in, l.parent, ':');
  return l;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilingual word embeddings for low-resource languages via language chains"};
  app.require_subcommand(1);
  app.set_version_flag("--version", CHAINMWE_VERSION);
  bool verbose = false, quiet = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");
  app.add_flag("-q,--quiet", quiet, "Only log errors");

  // train-mono
  auto* mono = app.add_subcommand("train-mono", "Train a monolingual space (chain step 1)");
  std::string mono_corpus, mono_lang, mono_out;
  TrainFlags mono_flags;
  mono->add_option("--corpus", mono_corpus, "Tokenized corpus, one sentence per line")->required();
  mono->add_option("--lang", mono_lang, "Language id used to tag the output")->required();
  mono->add_option("--out", mono_out, "Output embedding file (word2vec text)")->required();
  mono_flags.add_to(mono);

  // train-chain
  auto* chain = app.add_subcommand("train-chain", "Run the language chain described by a config file");
  std::string chain_config, chain_out;
  bool no_accumulate = false;
  std::size_t resume_from = 0;
  std::size_t chain_threads = 0;
  chain->add_option("config", chain_config, "Chain configuration file")->required();
  chain->add_flag("--no-accumulate", no_accumulate, "Use only the lexicon with the preceding language");
  chain->add_option("--resume-from", resume_from, "Resume at this 1-based step from its predecessor's checkpoint");
  chain->add_option("--threads", chain_threads, "Override worker threads for every step");
  chain->add_option("--out", chain_out, "Also write the final space here");

  // pivot-lexicon
  auto* piv = app.add_subcommand("pivot-lexicon", "Derive a k-i dictionary from pivot-k and pivot-i dictionaries");
  std::string piv_left, piv_right, piv_out, piv_lang = "pivot", left_lang = "left", right_lang = "right";
  piv->add_option("left", piv_left, "Dictionary pivot -> k")->required();
  piv->add_option("right", piv_right, "Dictionary pivot -> i")->required();
  piv->add_option("-o,--out", piv_out, "Output dictionary (stdout if omitted)");
  piv->add_option("--pivot-lang", piv_lang)->capture_default_str();
  piv->add_option("--left-lang", left_lang)->capture_default_str();
  piv->add_option("--right-lang", right_lang)->capture_default_str();

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Bilingual lexicon induction: precision at k");
  std::string ev_space, ev_test, ev_src, ev_trg, ev_retrieval = "nn", ev_k = "1,5,10", ev_dump, ev_out;
  std::size_t csls_k = 10;
  ev->add_option("--space", ev_space, "Multilingual embedding file")->required();
  ev->add_option("--test", ev_test, "Test dictionary (src trg per line)")->required();
  ev->add_option("--src", ev_src, "Source language id")->required();
  ev->add_option("--trg", ev_trg, "Target language id")->required();
  ev->add_option("--retrieval", ev_retrieval)->capture_default_str()->check(CLI::IsMember({"nn", "csls"}));
  ev->add_option("--k", ev_k, "Cutoffs")->capture_default_str();
  ev->add_option("--csls-k", csls_k, "Neighbourhood size for CSLS")->capture_default_str()->check(CLI::PositiveNumber);
  ev->add_option("--dump", ev_dump, "Per-query predictions file");
  ev->add_option("--out", ev_out, "Report file (stdout if omitted)");

  // synth-gen
  auto* syn = app.add_subcommand("synth-gen", "Generate synthetic cipher corpora and gold dictionaries");
  SynthSpec spec;
  std::string syn_dir, syn_seed = std::to_string(kDefaultSeed);
  std::vector<std::string> syn_langs;
  syn->add_option("--out-dir", syn_dir, "Output directory")->required();
  syn->add_option("--vocab-size", spec.vocab_size)->capture_default_str();
  syn->add_option("--tokens", spec.corpus_tokens)->capture_default_str();
  syn->add_option("--zipf", spec.zipf_exponent)->capture_default_str();
  syn->add_option("--bigram-weight", spec.bigram_weight)->capture_default_str();
  syn->add_option("--lang", syn_langs, "id[:noise[:parent]], repeatable")->required();
  syn->add_option("--seed", syn_seed, "Integer seed, or 'random'")->capture_default_str();

  // inspect
  auto* ins = app.add_subcommand("inspect", "Summarize an embedding, dictionary or corpus file");
  std::string ins_space, ins_lex, ins_corpus;
  VocabSettings ins_vocab;
  ins->add_option("--space", ins_space);
  ins->add_option("--lexicon", ins_lex);
  ins->add_option("--corpus", ins_corpus);
  ins->add_option("--min-count", ins_vocab.min_count)->capture_default_str();
  ins->add_option("--max-vocab", ins_vocab.max_vocab)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  auto logger = spdlog::stderr_color_st("chainmwe");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(quiet ? spdlog::level::err : verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (mono->parsed()) {
      TrainConfig cfg = mono_flags.cfg;
      cfg.mode = parse_train_mode(mono_flags.mode);
      cfg.seed = resolve_seed(mono_flags.seed);
      cfg.validate();
      Corpus corpus = Corpus::from_file(mono_lang, mono_corpus);
      corpus.set_lowercase(mono_flags.lowercase);
      if (!std::filesystem::is_regular_file(mono_corpus)) throw IoError("corpus not found: " + mono_corpus);
      const Vocabulary vocab = build_vocab(corpus, mono_flags.vocab);
      const TrainedModel model = train(corpus, vocab, cfg, AnchorSet{});
      save_text(to_space(model), mono_out);
      std::cout << header("train-mono", options_hash(*mono), std::to_string(cfg.seed)) << '\n';
      std::cout << "language\t" << mono_lang << "\nvocab\t" << vocab.size() << "\ntokens\t" << vocab.total_tokens()
                << "\nepochs\t" << cfg.epochs << '\n';
      for (std::size_t e = 0; e < model.epoch_loss.size(); ++e) {
        std::cout << "loss\t" << e + 1 << '\t' << model.epoch_loss[e] << '\n';
      }
      std::cout << "output\t" << mono_out << '\n';
    } else if (chain->parsed()) {
      ChainConfig cfg = load_chain_config(chain_config);
      if (no_accumulate) cfg.accumulate = false;
      if (!chain_out.empty()) cfg.output = chain_out;
      ChainRunOptions opts;
      opts.resume_from = resume_from;
      if (chain_threads > 0) opts.threads = chain_threads;
      auto [space, report] = run_chain(cfg, opts);
      std::cout << header("train-chain", cfg.hash(), std::to_string(cfg.seed)) << '\n';
      std::cout << "accumulate\t" << (cfg.accumulate ? "true" : "false") << '\n';
      write_report_text(report, std::cout);
    } else if (piv->parsed()) {
      const Lexicon left = load_lexicon(piv_left, piv_lang, left_lang);
      const Lexicon right = load_lexicon(piv_right, piv_lang, right_lang);
      const Lexicon out = pivot(left, right);
      if (out.empty()) spdlog::warn("no shared pivot words; the derived dictionary is empty");
      if (piv_out.empty()) {
        save_lexicon(out, std::cout);
      } else {
        save_lexicon(out, std::filesystem::path(piv_out));
      }
      spdlog::info("{} pairs ({} {} words, {} {} words)", out.size(), out.source_words().size(), left_lang,
                   out.target_words().size(), right_lang);
    } else if (ev->parsed()) {
      EvalConfig cfg;
      cfg.retrieval = parse_retrieval(ev_retrieval);
      cfg.ks = parse_ks(ev_k);
      cfg.csls_k = csls_k;
      cfg.src_lang = ev_src;
      cfg.trg_lang = ev_trg;
      cfg.validate();
      const EmbeddingSpace space = load_text(std::filesystem::path(ev_space));
      const Lexicon test = load_lexicon(ev_test, ev_src, ev_trg);
      const EvalReport report = precision_at_k(space, test, cfg);
      Output out(ev_out);
      out.stream() << header("evaluate", options_hash(*ev), "none") << '\n';
      write_report(report, out.stream());
      if (!ev_dump.empty()) {
        std::ofstream dump(ev_dump, std::ios::binary);
        if (!dump) throw IoError("cannot write " + ev_dump);
        write_predictions(report, dump);
      }
    } else if (syn->parsed()) {
      spec.seed = resolve_seed(syn_seed);
      for (const auto& l : syn_langs) spec.languages.push_back(parse_synth_language(l));
      const SynthOutput out = generate(spec);
      write_synth(out, syn_dir);
      std::cout << header("synth-gen", options_hash(*syn), std::to_string(spec.seed)) << '\n';
      for (const auto& c : out.corpora) std::cout << "corpus\t" << c.language << '\t' << syn_dir << '/' << c.language << ".txt\n";
      for (const auto& g : out.gold) {
        std::cout << "gold\t" << g.src_lang << '-' << g.trg_lang << '\t' << g.size() << '\n';
      }
    } else if (ins->parsed()) {
      if (ins_space.empty() + ins_lex.empty() + ins_corpus.empty() != 2) {
        std::cerr << "inspect: give exactly one of --space, --lexicon, --corpus\n";
        return 1;
      }
      if (!ins_space.empty()) {
        const EmbeddingSpace s = load_text(std::filesystem::path(ins_space));
        std::cout << "entries\t" << s.size() << "\ndim\t" << s.dim() << '\n';
        for (const auto& l : s.languages()) std::cout << "language\t" << l << '\t' << s.count(l) << '\n';
      } else if (!ins_lex.empty()) {
        LexiconLoadStats st;
        load_lexicon(ins_lex, "src", "trg", &st);
        std::cout << "lines\t" << st.lines << "\nduplicates\t" << st.duplicates << "\nunique_pairs\t"
                  << st.unique_pairs << "\nunique_source_words\t" << st.unique_source_words
                  << "\nunique_target_words\t" << st.unique_target_words << '\n';
      } else {
        const Corpus c = Corpus::from_file("corpus", ins_corpus);
        if (!std::filesystem::is_regular_file(ins_corpus)) throw IoError("corpus not found: " + ins_corpus);
        const Vocabulary v = build_vocab(c, ins_vocab);
        std::cout << "tokens\t" << v.total_tokens() << "\nvocab\t" << v.size() << "\nretained_tokens\t"
                  << v.retained_tokens() << '\n';
      }
    }
  } catch (const CLI::ValidationError& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const NumericalError& e) {
    spdlog::error("{}", e.what());
    return 3;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 0;
}
