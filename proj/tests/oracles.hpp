#pragma once

/// Brute-force reference implementations used to cross-check the engine.
/// Polynomials are represented as lists of (coefficient, word) pairs where
/// a word is an ordered list of coordinate factors; reordering is done by
/// adjacent transpositions, each odd-odd swap contributing a sign. Nothing
/// here shares code with the library's sparse normal-form arithmetic.

#include <map>
#include <random>
#include <vector>

#include "qstruct/galgebra.hpp"

namespace oracle {

using qstruct::Chart;
using qstruct::ChartPtr;
using qstruct::Expo;
using qstruct::Poly;
using qstruct::Rat;

using Word = std::vector<std::size_t>;

struct Term {
  Rat coeff;
  Word word;
};

using WordPoly = std::vector<Term>;

/// Bubble sort with explicit sign tracking; returns 0 coefficient terms
/// for words with a repeated odd factor.
inline std::pair<int, Word> sort_word(const Chart& chart, Word w) {
  int sign = 1;
  for (std::size_t pass = 0; pass + 1 < w.size() || pass == 0; ++pass) {
    bool swapped = false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      if (w[i] > w[i + 1]) {
        if (chart.parity(w[i]) && chart.parity(w[i + 1])) sign = -sign;
        std::swap(w[i], w[i + 1]);
        swapped = true;
      }
    }
    if (!swapped) break;
  }
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (w[i] == w[i + 1] && chart.parity(w[i])) return {0, {}};
  return {sign, std::move(w)};
}

/// Collects sorted words into an exponent-keyed map, dropping zeros.
inline std::map<Expo, Rat> collect(const Chart& chart, const WordPoly& p) {
  std::map<Expo, Rat> acc;
  for (const auto& t : p) {
    auto [sign, w] = sort_word(chart, t.word);
    if (sign == 0 || sgn(t.coeff) == 0) continue;
    Expo e(chart.size(), 0);
    for (const std::size_t i : w) e[i] += 1;
    acc[e] += sign > 0 ? t.coeff : Rat(-t.coeff);
    if (sgn(acc[e]) == 0) acc.erase(e);
  }
  return acc;
}

/// Word concatenation product.
inline WordPoly mul(const WordPoly& a, const WordPoly& b) {
  WordPoly out;
  for (const auto& ta : a)
    for (const auto& tb : b) {
      Word w = ta.word;
      w.insert(w.end(), tb.word.begin(), tb.word.end());
      out.push_back({ta.coeff * tb.coeff, std::move(w)});
    }
  return out;
}

/// Left derivative on words: remove each matching factor after moving the
/// derivative past the preceding factors.
inline WordPoly derive(const Chart& chart, const WordPoly& p, std::size_t k) {
  WordPoly out;
  for (const auto& t : p) {
    for (std::size_t j = 0; j < t.word.size(); ++j) {
      if (t.word[j] != k) continue;
      int sign = 1;
      if (chart.parity(k))
        for (std::size_t l = 0; l < j; ++l)
          if (chart.parity(t.word[l])) sign = -sign;
      Word w;
      for (std::size_t l = 0; l < t.word.size(); ++l)
        if (l != j) w.push_back(t.word[l]);
      out.push_back({sign > 0 ? t.coeff : Rat(-t.coeff), std::move(w)});
    }
  }
  return out;
}

inline Poly to_poly(ChartPtr chart, const WordPoly& p) {
  Poly out(chart);
  for (const auto& [e, c] : collect(*chart, p)) out.add_term(e, c);
  return out;
}

/// Random chart with the given coordinate count and degree bound.
inline ChartPtr random_chart(std::mt19937_64& rng, std::size_t n, int max_degree) {
  std::uniform_int_distribution<int> deg(1, max_degree);
  std::vector<qstruct::Coordinate> coords;
  for (std::size_t i = 0; i < n; ++i)
    coords.push_back({"q" + std::to_string(i + 1), deg(rng)});
  return qstruct::make_chart(std::move(coords));
}

inline Rat random_rat(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-6, 6);
  std::uniform_int_distribution<long> den(1, 4);
  Rat r(num(rng), den(rng));
  r.canonicalize();
  return r;
}

inline WordPoly random_word_poly(std::mt19937_64& rng, const Chart& chart,
                                 std::size_t max_terms, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> nterms(1, max_terms);
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, chart.size() - 1);
  WordPoly out;
  const std::size_t n = nterms(rng);
  for (std::size_t t = 0; t < n; ++t) {
    Word w;
    const std::size_t l = len(rng);
    for (std::size_t i = 0; i < l; ++i) w.push_back(pick(rng));
    out.push_back({random_rat(rng), std::move(w)});
  }
  return out;
}

}  // namespace oracle
