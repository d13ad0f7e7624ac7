// Chain configuration file: INI sections, parsed with Boost.PropertyTree.
//
//   [chain]              languages, accumulate, checkpoint_dir, output, seed
//   [train]              defaults applied to every language
//   [language <id>]      corpus = <path>, plus any [train] key as override
//   [lexicon <a> <b>]    path = <dictionary with a-words left, b-words right>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "chainmwe/chain.hpp"
#include "chainmwe/error.hpp"
#include "chainmwe/hash.hpp"

namespace chainmwe {

namespace pt = boost::property_tree;

namespace {

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("'" + key + "' expects a boolean, got '" + v + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  T out{};
  if (!(in >> out) || !in.eof()) throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  if constexpr (std::is_unsigned_v<T>) {
    if (v.find('-') != std::string::npos) throw ConfigError("'" + key + "' must not be negative");
  }
  return out;
}

// Applies one training key; returns false if the key is not a training key.
bool apply_train_key(LanguageSettings& s, const std::string& key, const std::string& v) {
  TrainConfig& t = s.train;
  if (key == "dim") t.dim = parse_number<std::size_t>(key, v);
  else if (key == "window") t.window = parse_number<std::size_t>(key, v);
  else if (key == "epochs") t.epochs = parse_number<std::size_t>(key, v);
  else if (key == "negatives") t.negatives = parse_number<std::size_t>(key, v);
  else if (key == "mode") t.mode = parse_train_mode(v);
  else if (key == "lr") t.initial_lr = parse_number<double>(key, v);
  else if (key == "min_lr") t.min_lr = parse_number<double>(key, v);
  else if (key == "sample") t.subsample_threshold = parse_number<double>(key, v);
  else if (key == "unigram_exponent") t.unigram_exponent = parse_number<double>(key, v);
  else if (key == "table_size") t.table_size = parse_number<std::size_t>(key, v);
  else if (key == "threads") t.threads = parse_number<std::size_t>(key, v);
  else if (key == "min_count") s.vocab.min_count = parse_number<std::uint64_t>(key, v);
  else if (key == "max_vocab") s.vocab.max_vocab = parse_number<std::size_t>(key, v);
  else if (key == "lowercase") s.lowercase = parse_bool(key, v);
  else return false;
  return true;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

const LanguageSettings& ChainConfig::language(const std::string& lang) const {
  auto it = settings.find(lang);
  if (it == settings.end()) throw ConfigError("no [language " + lang + "] section");
  return it->second;
}

std::string ChainConfig::hash() const {
  Fnv1a h;
  for (const auto& l : languages) h.update(l).update(std::string_view("\n"));
  for (const auto& [lang, s] : settings) {
    const TrainConfig& t = s.train;
    h.update(lang).update(s.corpus.string());
    h.update(std::uint64_t{t.dim}).update(std::uint64_t{t.window}).update(std::uint64_t{t.epochs});
    h.update(std::uint64_t{t.negatives}).update(std::uint64_t(t.mode == TrainMode::Cbow));
    h.update(t.initial_lr).update(t.min_lr).update(t.subsample_threshold).update(t.unigram_exponent);
    h.update(std::uint64_t{t.table_size}).update(s.vocab.min_count).update(std::uint64_t{s.vocab.max_vocab});
    h.update(std::uint64_t(s.lowercase));
  }
  for (const auto& lx : lexicons) h.update(lx.first).update(lx.second).update(lx.path.string());
  h.update(std::uint64_t(accumulate)).update(seed);
  return h.hex();
}

ChainConfig load_chain_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read chain config " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  pt::ptree tree;
  try {
    std::istringstream ini(text);
    pt::read_ini(ini, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(path.string(), e.line(), e.message());
  }
  // read_ini drops sections without keys; a bare [lexicon a b] is still an error.
  {
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
      const auto open = line.find_first_not_of(" \t");
      if (open == std::string::npos || line[open] != '[') continue;
      const std::string name = line.substr(open + 1, line.find(']') - open - 1);
      const auto parts = words(name);
      if (!parts.empty() && parts[0] == "lexicon" && !tree.get_child_optional(pt::ptree::path_type(name, '\0'))) {
        throw ConfigError("[" + name + "] needs a 'path' key");
      }
    }
  }
  const auto base = path.parent_path();
  ChainConfig cfg;

  LanguageSettings defaults;
  if (auto train = tree.get_child_optional("train")) {
    for (const auto& [key, node] : *train) {
      if (!apply_train_key(defaults, key, node.data())) throw ConfigError("unknown key '" + key + "' in [train]");
    }
  }

  bool have_chain = false;
  cfg.checkpoint_dir = resolve(base, "checkpoints");
  for (const auto& [section, node] : tree) {
    const auto parts = words(section);
    if (parts.empty()) continue;
    if (section == "chain") {
      have_chain = true;
      for (const auto& [key, value] : node) {
        const std::string& v = value.data();
        if (key == "languages") cfg.languages = words(v);
        else if (key == "accumulate") cfg.accumulate = parse_bool(key, v);
        else if (key == "checkpoint_dir") cfg.checkpoint_dir = resolve(base, v);
        else if (key == "output") cfg.output = resolve(base, v);
        else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, v);
        else throw ConfigError("unknown key '" + key + "' in [chain]");
      }
    } else if (parts[0] == "language" && parts.size() == 2) {
      LanguageSettings s = defaults;
      for (const auto& [key, value] : node) {
        if (key == "corpus") s.corpus = resolve(base, value.data());
        else if (!apply_train_key(s, key, value.data())) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      }
      cfg.settings[parts[1]] = s;
    } else if (parts[0] == "lexicon" && parts.size() == 3) {
      auto p = node.get_optional<std::string>("path");
      if (!p) throw ConfigError("[" + section + "] needs a 'path' key");
      for (const auto& [key, value] : node) {
        if (key != "path") throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      }
      cfg.lexicons.push_back({parts[1], parts[2], resolve(base, *p)});
    } else if (section != "train") {
      throw ConfigError("unknown section [" + section + "]");
    }
  }
  if (!have_chain) throw ConfigError(path.string() + ": missing [chain] section");
  // Languages without their own section still pick up [train] defaults.
  for (const auto& l : cfg.languages) cfg.settings.try_emplace(l, defaults);
  return cfg;
}

namespace {

bool has_direct(const ChainConfig& c, const std::string& a, const std::string& b) {
  for (const auto& lx : c.lexicons) {
    if ((lx.first == a && lx.second == b) || (lx.first == b && lx.second == a)) return true;
  }
  return false;
}

bool derivable(const ChainConfig& c, const std::string& a, const std::string& b) {
  if (has_direct(c, a, b)) return true;
  const std::string& hub = c.languages.front();
  return a != hub && b != hub && has_direct(c, hub, a) && has_direct(c, hub, b);
}

}  // namespace

bool has_errors(const std::vector<ConfigIssue>& issues) {
  for (const auto& i : issues) {
    if (i.severity == ConfigIssue::Severity::Error) return true;
  }
  return false;
}

std::vector<ConfigIssue> validate(const ChainConfig& config) {
  std::vector<ConfigIssue> issues;
  auto error = [&](std::string m) { issues.push_back({ConfigIssue::Severity::Error, std::move(m)}); };
  auto warn = [&](std::string m) { issues.push_back({ConfigIssue::Severity::Warning, std::move(m)}); };

  const auto& langs = config.languages;
  if (langs.size() < 2) error("a chain needs at least 2 languages, got " + std::to_string(langs.size()));
  std::set<std::string> seen;
  for (const auto& l : langs) {
    try {
      check_language_id(l);
    } catch (const ConfigError& e) {
      error(e.what());
    }
    if (!seen.insert(l).second) error("language '" + l + "' appears more than once in the chain");
  }

  for (const auto& l : langs) {
    auto it = config.settings.find(l);
    if (it == config.settings.end() || it->second.corpus.empty()) {
      error("language '" + l + "' has no corpus");
      continue;
    }
    if (!std::filesystem::is_regular_file(it->second.corpus)) {
      error("corpus for '" + l + "' not found: " + it->second.corpus.string());
    }
    try {
      it->second.train.validate();
    } catch (const ConfigError& e) {
      error("training settings for '" + l + "': " + e.what());
    }
  }

  for (const auto& lx : config.lexicons) {
    if (!std::filesystem::is_regular_file(lx.path)) {
      error("lexicon " + lx.first + "-" + lx.second + " not found: " + lx.path.string());
    }
    if (!seen.contains(lx.first) || !seen.contains(lx.second)) {
      warn("lexicon " + lx.first + "-" + lx.second + " involves a language outside the chain");
    }
  }

  for (std::size_t i = 1; i < langs.size(); ++i) {
    const auto& cur = langs[i];
    if (config.accumulate) {
      bool any = false;
      for (std::size_t k = 0; k < i; ++k) any = any || derivable(config, langs[k], cur);
      if (!any) error("no lexicon pairs '" + cur + "' with any earlier language of the chain");
    } else if (!derivable(config, langs[i - 1], cur)) {
      error("no lexicon between '" + langs[i - 1] + "' and its successor '" + cur +
            "' (required without accumulation)");
    }
  }

  if (!langs.empty() && config.settings.contains(langs.front())) {
    const auto& first = langs.front();
    const std::size_t dim = config.settings.at(first).train.dim;
    for (const auto& l : langs) {
      auto it = config.settings.find(l);
      if (it != config.settings.end() && it->second.train.dim != dim) {
        error("dim mismatch: '" + first + "' uses " + std::to_string(dim) + ", '" + l + "' uses " +
              std::to_string(it->second.train.dim));
      }
    }
  }

  // Chains are expected to run from larger to smaller corpora.
  for (std::size_t i = 1; i < langs.size(); ++i) {
    auto a = config.settings.find(langs[i - 1]);
    auto b = config.settings.find(langs[i]);
    if (a == config.settings.end() || b == config.settings.end()) continue;
    std::error_code ea, eb;
    const auto sa = std::filesystem::file_size(a->second.corpus, ea);
    const auto sb = std::filesystem::file_size(b->second.corpus, eb);
    if (!ea && !eb && sb > sa) {
      warn("corpus of '" + langs[i] + "' (" + std::to_string(sb) + " bytes) is larger than that of '" +
           langs[i - 1] + "' (" + std::to_string(sa) + " bytes); chains usually shrink towards the target");
    }
  }
  return issues;
}

}  // namespace chainmwe
