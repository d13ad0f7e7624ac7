#include <doctest.h>

#include <algorithm>
#include <array>
#include <map>
#include <sstream>

#include "chainmwe/error.hpp"
#include "chainmwe/synth.hpp"

using namespace chainmwe;

namespace {

SynthSpec two_languages(double noise, std::uint64_t seed = 1) {
  SynthSpec spec;
  spec.vocab_size = 500;
  spec.corpus_tokens = 20'000;
  spec.seed = seed;
  spec.languages = {{"aa", 0.0, ""}, {"bb", noise, ""}};
  return spec;
}

std::vector<std::string> tokens(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// Pearson statistic of a contingency table, expected counts from the margins.
template <std::size_t N>
double chi_square(const std::array<std::array<double, N>, N>& table) {
  std::array<double, N> rows{}, cols{};
  double total = 0;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      rows[i] += table[i][j];
      cols[j] += table[i][j];
      total += table[i][j];
    }
  }
  double stat = 0;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      const double e = rows[i] * cols[j] / total;
      stat += (table[i][j] - e) * (table[i][j] - e) / e;
    }
  }
  return stat;
}

template <std::size_t N>
std::array<std::array<double, N>, N> aligned_table(const SynthOutput& out) {
  std::array<std::array<double, N>, N> table{};
  const auto& a = out.corpora[0].types;
  const auto& b = out.corpora[1].types;
  for (std::size_t s = 0; s < a.size(); ++s) {
    for (std::size_t i = 0; i < a[s].size(); ++i) table[a[s][i] % N][b[s][i] % N] += 1;
  }
  return table;
}

}  // namespace

TEST_CASE("noise 0 is a pure relabeling") {
  const SynthOutput out = generate(two_languages(0.0));
  const Lexicon& gold = out.gold_between("aa", "bb");
  CHECK(gold.size() == 500);
  CHECK(gold.source_words().size() == 500);
  std::map<std::string, std::string> map;
  std::set<std::string> targets;
  for (const auto& [s, t] : gold.pairs) {
    map[s] = t;
    targets.insert(t);
  }
  CHECK(targets.size() == 500);

  const auto a = tokens(out.corpora[0].text), b = tokens(out.corpora[1].text);
  REQUIRE(a.size() == b.size());
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < a.size(); ++i) mismatches += map.at(a[i]) != b[i];
  CHECK(mismatches == 0);
  CHECK(out.corpora[0].text != out.corpora[1].text);
  CHECK(std::count(out.perturbed[1].begin(), out.perturbed[1].end(), true) == 0);
}

TEST_CASE("noise 1 makes aligned tokens independent") {
  // Five residue classes of the type id give a 5x5 table with 16 degrees of
  // freedom; 39.25 is the 0.999 quantile.
  const double stat1 = chi_square(aligned_table<5>(generate(two_languages(1.0))));
  CHECK(stat1 < 39.25);
  const double stat0 = chi_square(aligned_table<5>(generate(two_languages(0.0))));
  CHECK(stat0 > 1000.0);
  const double half = chi_square(aligned_table<5>(generate(two_languages(0.5))));
  CHECK(half > 39.25);
  CHECK(half < stat0);
}

TEST_CASE("the perturbed fraction tracks the noise level") {
  SynthSpec spec = two_languages(0.3);
  spec.vocab_size = 2000;
  const SynthOutput out = generate(spec);
  const auto n = std::count(out.perturbed[1].begin(), out.perturbed[1].end(), true);
  CHECK(n > 600 - 90);
  CHECK(n < 600 + 90);
  // Untouched types keep every occurrence in place.
  const auto& a = out.corpora[0].types;
  const auto& b = out.corpora[1].types;
  for (std::size_t s = 0; s < a.size(); ++s) {
    for (std::size_t i = 0; i < a[s].size(); ++i) {
      if (!out.perturbed[1][a[s][i]]) CHECK(b[s][i] == a[s][i]);
    }
  }
}

TEST_CASE("a child language inherits its parent's perturbations") {
  SynthSpec spec = two_languages(0.2);
  spec.languages.push_back({"cc", 0.2, "bb"});
  const SynthOutput out = generate(spec);
  const auto& b = out.corpora[1].types;
  const auto& c = out.corpora[2].types;
  for (std::size_t s = 0; s < b.size(); ++s) {
    for (std::size_t i = 0; i < b[s].size(); ++i) {
      if (!out.perturbed[2][b[s][i]]) CHECK(c[s][i] == b[s][i]);
    }
  }
  CHECK(out.gold.size() == 3);
}

TEST_CASE("generation is seeded") {
  const SynthOutput a = generate(two_languages(0.4, 5)), b = generate(two_languages(0.4, 5));
  for (std::size_t i = 0; i < 2; ++i) CHECK(a.corpora[i].text == b.corpora[i].text);
  CHECK(a.gold[0].pairs == b.gold[0].pairs);
  CHECK(generate(two_languages(0.4, 6)).corpora[0].text != a.corpora[0].text);
}

TEST_CASE("corpora have the requested token count and sentence lengths") {
  for (std::size_t n : {1ul, 7ul, 999ul, 20'000ul}) {
    SynthSpec spec = two_languages(0.5);
    spec.corpus_tokens = n;
    const SynthOutput out = generate(spec);
    for (const auto& c : out.corpora) {
      CHECK(tokens(c.text).size() == n);
      for (std::size_t s = 0; s + 1 < c.types.size(); ++s) {
        CHECK(c.types[s].size() >= spec.min_sentence);
        CHECK(c.types[s].size() <= spec.max_sentence);
      }
      CHECK(std::count(c.text.begin(), c.text.end(), '\n') == std::ptrdiff_t(c.types.size()));
    }
  }
}

TEST_CASE("generator settings are validated") {
  SynthSpec spec = two_languages(0.1);
  spec.languages.push_back({"cc", 0.1, "zz"});
  CHECK_THROWS_AS(generate(spec), ConfigError);
  spec = two_languages(1.5);
  CHECK_THROWS_AS(generate(spec), ConfigError);
  spec = two_languages(0.1);
  spec.languages[1].id = "aa";
  CHECK_THROWS_AS(generate(spec), ConfigError);
  spec = two_languages(0.1);
  spec.vocab_size = 3;
  CHECK_THROWS_AS(generate(spec), ConfigError);
  CHECK_THROWS_AS(generate(two_languages(0.1)).gold_between("bb", "aa"), ConfigError);
}
