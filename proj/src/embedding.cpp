#include "chainmwe/embedding.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "chainmwe/error.hpp"

namespace chainmwe {

TaggedWord TaggedWord::parse(std::string_view key) {
  const auto colon = key.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == key.size()) {
    throw ConfigError("expected a 'lang:word' key, got '" + std::string(key) + "'");
  }
  return {std::string(key.substr(0, colon)), std::string(key.substr(colon + 1))};
}

std::string make_key(std::string_view lang, std::string_view word) {
  std::string k;
  k.reserve(lang.size() + word.size() + 1);
  k.append(lang).push_back(':');
  k.append(word);
  return k;
}

void EmbeddingSpace::add(const TaggedWord& word, std::span<const float> vec) {
  if (vec.size() != dim_) {
    throw DimensionError("vector for '" + word.key() + "' has " + std::to_string(vec.size()) +
                         " components, space dim is " + std::to_string(dim_));
  }
  for (float v : vec) {
    if (!std::isfinite(v)) throw DimensionError("non-finite component in vector for '" + word.key() + "'");
  }
  check_language_id(word.lang);
  std::string key = word.key();
  if (index_.contains(key)) throw ConfigError("duplicate embedding key '" + key + "'");
  index_.emplace(key, keys_.size());
  keys_.push_back(std::move(key));
  data_.insert(data_.end(), vec.begin(), vec.end());
  languages_.insert(word.lang);
}

std::optional<std::size_t> EmbeddingSpace::find(std::string_view key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::span<const float>> EmbeddingSpace::vector(std::string_view key) const {
  if (auto i = find(key)) return row(*i);
  return std::nullopt;
}

std::size_t EmbeddingSpace::count(std::string_view lang) const {
  std::size_t n = 0;
  for (const auto& k : keys_) {
    if (k.size() > lang.size() && k[lang.size()] == ':' && std::string_view(k).substr(0, lang.size()) == lang) ++n;
  }
  return n;
}

void EmbeddingSpace::reserve(std::size_t rows) {
  keys_.reserve(rows);
  data_.reserve(rows * dim_);
  index_.reserve(rows);
}

EmbeddingSpace concat(const EmbeddingSpace& prev, const EmbeddingSpace& next) {
  if (prev.dim() != next.dim()) {
    throw DimensionError("cannot concatenate spaces of dim " + std::to_string(prev.dim()) + " and " +
                         std::to_string(next.dim()));
  }
  for (const auto& lang : next.languages()) {
    if (prev.languages().contains(lang)) {
      throw ConfigError("language '" + lang + "' is already part of the multilingual space");
    }
  }
  EmbeddingSpace out(prev.dim());
  out.reserve(prev.size() + next.size());
  for (const EmbeddingSpace* s : {&prev, &next}) {
    for (std::size_t i = 0; i < s->size(); ++i) out.add(TaggedWord::parse(s->key(i)), s->row(i));
  }
  return out;
}

EmbeddingSpace language_slice(const EmbeddingSpace& space, std::string_view lang) {
  if (!space.languages().contains(std::string(lang))) {
    throw ConfigError("language '" + std::string(lang) + "' is not present in the embedding space");
  }
  EmbeddingSpace out(space.dim());
  for (std::size_t i = 0; i < space.size(); ++i) {
    TaggedWord w = TaggedWord::parse(space.key(i));
    if (w.lang == lang) out.add(w, space.row(i));
  }
  return out;
}

void save_text(const EmbeddingSpace& space, std::ostream& out) {
  if (space.empty()) throw ConfigError("refusing to save an empty embedding space");
  out << space.size() << ' ' << space.dim() << '\n';
  std::string line;
  char buf[32];
  for (std::size_t i = 0; i < space.size(); ++i) {
    line = space.key(i);
    for (float v : space.row(i)) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
      line.push_back(' ');
      line.append(buf, end);
    }
    line.push_back('\n');
    out << line;
  }
}

void save_text(const EmbeddingSpace& space, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  save_text(space, out);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

EmbeddingSpace load_text(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source_name, 1, "missing header");
  std::vector<std::string_view> fields;
  split_tokens(line, fields);
  std::size_t count = 0, dim = 0;
  auto parse_size = [&](std::string_view f, std::size_t& v) {
    auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    return ec == std::errc() && p == f.data() + f.size();
  };
  if (fields.size() != 2 || !parse_size(fields[0], count) || !parse_size(fields[1], dim) || dim == 0) {
    throw ParseError(source_name, 1, "header must be '<count> <dim>'");
  }
  EmbeddingSpace space(dim);
  space.reserve(count);
  std::vector<float> vec(dim);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    split_tokens(line, fields);
    if (fields.empty()) continue;
    if (fields.size() != dim + 1) {
      throw ParseError(source_name, lineno,
                       "expected key + " + std::to_string(dim) + " values, found " + std::to_string(fields.size() - 1));
    }
    for (std::size_t d = 0; d < dim; ++d) {
      auto f = fields[d + 1];
      auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), vec[d]);
      if (ec != std::errc() || p != f.data() + f.size()) {
        throw ParseError(source_name, lineno, "bad float '" + std::string(f) + "'");
      }
    }
    try {
      space.add(TaggedWord::parse(fields[0]), vec);
    } catch (const Error& e) {
      throw ParseError(source_name, lineno, e.what());
    }
  }
  if (space.size() != count) {
    throw ParseError(source_name, lineno,
                     "header announces " + std::to_string(count) + " rows, found " + std::to_string(space.size()));
  }
  return space;
}

EmbeddingSpace load_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read embedding file " + path.string());
  return load_text(in, path.string());
}

}  // namespace chainmwe
