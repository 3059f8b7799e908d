#pragma once

// Test-side oracles, independent of the library's decoding paths.

#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "darelab/erasure.hpp"

namespace darelab::testing {

// Solves the Vandermonde system for one stripe by plain Gaussian elimination
// (the library interpolates via Lagrange basis polynomials instead).
inline std::vector<uint16_t> vandermonde_solve(const std::vector<uint16_t>& xs,
                                               const std::vector<uint16_t>& ys) {
  const size_t k = xs.size();
  std::vector<std::vector<uint16_t>> a(k, std::vector<uint16_t>(k + 1, 0));
  for (size_t i = 0; i < k; ++i) {
    uint16_t xp = 1;
    for (size_t j = 0; j < k; ++j) {
      a[i][j] = xp;
      xp = gf16::mul(xp, xs[i]);
    }
    a[i][k] = ys[i];
  }
  for (size_t c = 0; c < k; ++c) {
    size_t piv = c;
    while (a[piv][c] == 0) ++piv;
    std::swap(a[piv], a[c]);
    uint16_t iv = gf16::inv(a[c][c]);
    for (size_t j = c; j <= k; ++j) a[c][j] = gf16::mul(a[c][j], iv);
    for (size_t r = 0; r < k; ++r) {
      if (r == c || a[r][c] == 0) continue;
      uint16_t f = a[r][c];
      for (size_t j = c; j <= k; ++j)
        a[r][j] = static_cast<uint16_t>(a[r][j] ^ gf16::mul(f, a[c][j]));
    }
  }
  std::vector<uint16_t> out(k);
  for (size_t i = 0; i < k; ++i) out[i] = a[i][k];
  return out;
}

inline uint16_t horner(const std::vector<uint16_t>& coeff, uint16_t x) {
  uint16_t acc = 0;
  for (size_t j = coeff.size(); j-- > 0;) acc = static_cast<uint16_t>(gf16::mul(acc, x) ^ coeff[j]);
  return acc;
}

// Recovers the framed value from interpolated stripe words; mirrors the
// library's layout contract but is written independently.
inline std::optional<Value> oracle_unframe(const std::vector<uint16_t>& words, uint64_t bits) {
  if (words.size() < 2) return std::nullopt;
  uint64_t nbytes = words[0] | (uint64_t(words[1]) << 16);
  if (nbytes > (words.size() - 2) * 2) return std::nullopt;
  Value v;
  v.nominal_bits = bits;
  for (uint64_t i = 0; i < nbytes; ++i) {
    uint16_t w = words[2 + i / 2];
    v.bytes.push_back(uint8_t(i % 2 == 0 ? w & 0xFF : w >> 8));
  }
  if (nbytes % 2 == 1 && (words[2 + (nbytes - 1) / 2] >> 8) != 0) return std::nullopt;
  for (uint64_t i = 2 + (nbytes + 1) / 2; i < words.size(); ++i)
    if (words[i] != 0) return std::nullopt;
  return v;
}

inline std::optional<Value> oracle_interpolate(const std::vector<const Symbol*>& subset,
                                               const ProtocolParams& p) {
  const size_t k = size_t(p.t) + 1;
  const size_t nstripes = subset[0]->words.size();
  std::vector<uint16_t> xs(k), ys(k);
  for (size_t i = 0; i < k; ++i) xs[i] = uint16_t(subset[i]->index);
  std::vector<uint16_t> words;
  std::vector<std::vector<uint16_t>> per_stripe(nstripes);
  for (size_t s = 0; s < nstripes; ++s) {
    for (size_t i = 0; i < k; ++i) ys[i] = subset[i]->words[s];
    per_stripe[s] = vandermonde_solve(xs, ys);
    words.insert(words.end(), per_stripe[s].begin(), per_stripe[s].end());
  }
  return oracle_unframe(words, p.value_bits);
}

// Decode from exactly t+1 symbols (erasure oracle).
inline std::optional<Value> oracle_decode(const std::vector<Symbol>& symbols,
                                          const ProtocolParams& p) {
  std::vector<const Symbol*> subset;
  for (const Symbol& s : symbols) subset.push_back(&s);
  if (subset.size() != size_t(p.t) + 1) return std::nullopt;
  return oracle_interpolate(subset, p);
}

// Brute-force subset-decoding oracle: every (t+1)-subset proposes a
// candidate; framing-valid candidates matching >= |S|-t full symbols
// survive; a unique survivor is the answer.
inline std::optional<Value> oracle_decode_correcting(const std::vector<Symbol>& symbols,
                                                     const ProtocolParams& p) {
  const int m = int(symbols.size());
  const size_t k = size_t(p.t) + 1;
  if (m < 2 * p.t + 1) return std::nullopt;
  std::vector<const Symbol*> all;
  for (const Symbol& s : symbols) all.push_back(&s);
  std::vector<std::vector<uint8_t>> winners;
  std::vector<size_t> pick(k);
  std::vector<bool> sel(all.size(), false);
  std::fill(sel.begin(), sel.begin() + k, true);
  // iterate subsets via prev_permutation over the selection mask
  std::sort(sel.begin(), sel.end(), std::greater<bool>());
  do {
    std::vector<const Symbol*> subset;
    for (size_t i = 0; i < all.size(); ++i)
      if (sel[i]) subset.push_back(all[i]);
    bool same_len = true;
    for (const Symbol* s : subset)
      if (s->words.size() != subset[0]->words.size()) same_len = false;
    if (!same_len) continue;
    auto cand = oracle_interpolate(subset, p);
    if (!cand) continue;
    int matches = 0;
    std::vector<Symbol> enc = encode(*cand, p);
    for (const Symbol& s : symbols)
      if (s.index >= 1 && s.index <= p.n && enc[s.index - 1].words == s.words) ++matches;
    if (matches < m - p.t) continue;
    if (std::find(winners.begin(), winners.end(), cand->bytes) == winners.end())
      winners.push_back(cand->bytes);
  } while (std::prev_permutation(sel.begin(), sel.end()));
  if (winners.size() != 1) return std::nullopt;
  return Value{winners[0], p.value_bits};
}

inline Value random_value(const ProtocolParams& p, std::mt19937_64& rng) {
  Value v;
  v.nominal_bits = p.value_bits;
  v.bytes.resize((p.value_bits + 7) / 8);
  for (auto& b : v.bytes) b = uint8_t(rng());
  v.bytes[0] = 'V';
  return v;
}

} // namespace darelab::testing
