#include "darelab/erasure.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <optional>

namespace darelab {

namespace gf16 {

namespace {

constexpr uint32_t kPoly = 0x1100B; // x^16 + x^12 + x^3 + x + 1
constexpr uint32_t kOrder = 65535;

uint16_t mul_slow(uint16_t a, uint16_t b) {
  uint32_t acc = 0;
  uint32_t aa = a;
  while (b) {
    if (b & 1) acc ^= aa;
    aa <<= 1;
    if (aa & 0x10000) aa ^= kPoly;
    b >>= 1;
  }
  return static_cast<uint16_t>(acc);
}

struct Tables {
  std::array<uint16_t, 2 * kOrder> exp;
  std::array<uint32_t, 65536> log;
  Tables() {
    // Find a generator: try small candidates until the full multiplicative
    // group is enumerated.
    for (uint16_t g = 2;; ++g) {
      log.fill(kOrder);
      uint16_t x = 1;
      uint32_t i = 0;
      for (; i < kOrder; ++i) {
        if (log[x] != kOrder) break; // cycle shorter than the group order
        exp[i] = x;
        log[x] = i;
        x = mul_slow(x, g);
      }
      if (i == kOrder && x == 1) break;
    }
    for (uint32_t i = 0; i < kOrder; ++i) exp[kOrder + i] = exp[i];
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

} // namespace

uint16_t mul(uint16_t a, uint16_t b) {
  if (a == 0 || b == 0) return 0;
  const Tables& t = tables();
  return t.exp[t.log[a] + t.log[b]];
}

uint16_t inv(uint16_t a) {
  const Tables& t = tables();
  return t.exp[kOrder - t.log[a]];
}

uint16_t pow(uint16_t a, uint64_t e) {
  if (e == 0) return 1;
  if (a == 0) return 0;
  const Tables& t = tables();
  return t.exp[(t.log[a] * (e % kOrder)) % kOrder];
}

} // namespace gf16

namespace {

using Poly = std::vector<uint16_t>; // coefficients, ascending degree

uint16_t poly_eval(const Poly& c, uint16_t x) {
  uint16_t acc = 0;
  for (size_t j = c.size(); j-- > 0;) acc = static_cast<uint16_t>(gf16::mul(acc, x) ^ c[j]);
  return acc;
}

// Lagrange interpolation returning the coefficient vector of the unique
// degree < k polynomial through (xs[i], ys[i]).
Poly interpolate(const std::vector<uint16_t>& xs, const std::vector<uint16_t>& ys) {
  const size_t k = xs.size();
  // master product M(x) = prod (x - x_j)
  Poly master(k + 1, 0);
  master[0] = 1;
  size_t deg = 0;
  for (size_t j = 0; j < k; ++j) {
    for (size_t d = deg + 1; d-- > 0;) {
      uint16_t c = master[d];
      master[d] = static_cast<uint16_t>(gf16::mul(c, xs[j]) ^ (d > 0 ? master[d - 1] : 0));
    }
    master[deg + 1] = 1;
    // after the in-place pass the leading 1 is explicit
    ++deg;
  }
  Poly out(k, 0);
  Poly q(k, 0);
  for (size_t i = 0; i < k; ++i) {
    // Q_i = M / (x - x_i), synthetic division
    uint16_t carry = master[k];
    for (size_t d = k; d-- > 0;) {
      q[d] = carry;
      carry = static_cast<uint16_t>(gf16::mul(carry, xs[i]) ^ master[d]);
    }
    uint16_t denom = poly_eval(q, xs[i]);
    uint16_t scale = gf16::mul(ys[i], gf16::inv(denom));
    for (size_t d = 0; d < k; ++d) out[d] = static_cast<uint16_t>(out[d] ^ gf16::mul(scale, q[d]));
  }
  return out;
}

std::vector<uint16_t> frame_words(const Value& v, int k) {
  const size_t nbytes = v.bytes.size();
  std::vector<uint16_t> words;
  words.reserve(2 + nbytes / 2 + static_cast<size_t>(k));
  words.push_back(static_cast<uint16_t>(nbytes & 0xFFFF));
  words.push_back(static_cast<uint16_t>((nbytes >> 16) & 0xFFFF));
  for (size_t i = 0; i < nbytes; i += 2) {
    uint16_t w = v.bytes[i];
    if (i + 1 < nbytes) w |= static_cast<uint16_t>(v.bytes[i + 1]) << 8;
    words.push_back(w);
  }
  while (words.size() % k != 0) words.push_back(0);
  return words;
}

// Inverse of frame_words; rejects byte strings that do not fit the layout.
std::optional<Value> unframe_words(const std::vector<uint16_t>& words, uint64_t nominal_bits) {
  if (words.size() < 2) return std::nullopt;
  const uint64_t nbytes = static_cast<uint64_t>(words[0]) | (static_cast<uint64_t>(words[1]) << 16);
  const uint64_t capacity = (words.size() - 2) * 2;
  if (nbytes > capacity) return std::nullopt;
  Value out;
  out.nominal_bits = nominal_bits;
  out.bytes.resize(nbytes);
  for (uint64_t i = 0; i < nbytes; ++i) {
    uint16_t w = words[2 + i / 2];
    out.bytes[i] = static_cast<uint8_t>(i % 2 == 0 ? (w & 0xFF) : (w >> 8));
  }
  // everything past the payload must be zero padding
  uint64_t used = 2 + (nbytes + 1) / 2;
  if (nbytes % 2 == 1 && (words[1 + (nbytes + 1) / 2] >> 8) != 0) return std::nullopt;
  for (uint64_t i = used; i < words.size(); ++i)
    if (words[i] != 0) return std::nullopt;
  return out;
}

// A candidate codeword as per-stripe coefficient vectors.
struct Candidate {
  std::vector<Poly> stripes;

  uint16_t word_at(size_t stripe, uint16_t x) const { return poly_eval(stripes[stripe], x); }

  bool matches(const Symbol& s) const {
    for (size_t j = 0; j < stripes.size(); ++j)
      if (s.words[j] != word_at(j, static_cast<uint16_t>(s.index))) return false;
    return true;
  }

  std::vector<uint16_t> all_words() const {
    std::vector<uint16_t> out;
    const size_t k = stripes.empty() ? 0 : stripes[0].size();
    out.reserve(stripes.size() * k);
    for (const Poly& p : stripes) out.insert(out.end(), p.begin(), p.end());
    return out;
  }
};

Candidate interpolate_candidate(const std::vector<const Symbol*>& subset, size_t nstripes) {
  std::vector<uint16_t> xs(subset.size());
  for (size_t i = 0; i < subset.size(); ++i) xs[i] = static_cast<uint16_t>(subset[i]->index);
  Candidate c;
  c.stripes.resize(nstripes);
  std::vector<uint16_t> ys(subset.size());
  for (size_t j = 0; j < nstripes; ++j) {
    for (size_t i = 0; i < subset.size(); ++i) ys[i] = subset[i]->words[j];
    c.stripes[j] = interpolate(xs, ys);
  }
  return c;
}

// Gaussian elimination over GF(2^16); returns any solution of A x = b or
// nullopt when the system is inconsistent. Free variables are set to zero.
std::optional<std::vector<uint16_t>> solve_linear(std::vector<std::vector<uint16_t>> a,
                                                  std::vector<uint16_t> b) {
  const size_t rows = a.size();
  const size_t cols = rows ? a[0].size() : 0;
  std::vector<size_t> pivot_col_of_row;
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t piv = r;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    std::swap(b[piv], b[r]);
    uint16_t iv = gf16::inv(a[r][c]);
    for (size_t cc = c; cc < cols; ++cc) a[r][cc] = gf16::mul(a[r][cc], iv);
    b[r] = gf16::mul(b[r], iv);
    for (size_t rr = 0; rr < rows; ++rr) {
      if (rr == r || a[rr][c] == 0) continue;
      uint16_t f = a[rr][c];
      for (size_t cc = c; cc < cols; ++cc)
        a[rr][cc] = static_cast<uint16_t>(a[rr][cc] ^ gf16::mul(f, a[r][cc]));
      b[rr] = static_cast<uint16_t>(b[rr] ^ gf16::mul(f, b[r]));
    }
    pivot_col_of_row.push_back(c);
    ++r;
  }
  for (size_t rr = r; rr < rows; ++rr)
    if (b[rr] != 0) return std::nullopt;
  std::vector<uint16_t> x(cols, 0);
  for (size_t i = 0; i < r; ++i) x[pivot_col_of_row[i]] = b[i];
  return x;
}

uint64_t binom(uint64_t n, uint64_t k, uint64_t cap) {
  if (k > n) return 0;
  uint64_t acc = 1;
  for (uint64_t i = 0; i < k; ++i) {
    acc = acc * (n - i) / (i + 1);
    if (acc > cap) return cap + 1;
  }
  return acc;
}

constexpr uint64_t kSubsetBudget = 20000;

} // namespace

std::vector<Symbol> encode(const Value& v, const ProtocolParams& p) {
  if (v.bytes.empty() || v.bytes.size() > 0xFFFFFFFFull) throw LayoutError{};
  if (p.n > 65534) throw LayoutError{}; // evaluation points must be distinct field elements
  const int k = p.t + 1;
  std::vector<uint16_t> words = frame_words(v, k);
  const size_t nstripes = words.size() / k;
  std::vector<Symbol> out(p.n);
  for (int i = 1; i <= p.n; ++i) {
    Symbol& s = out[i - 1];
    s.index = i;
    s.words.resize(nstripes);
  }
  Poly coeff(k);
  for (size_t j = 0; j < nstripes; ++j) {
    std::copy(words.begin() + j * k, words.begin() + (j + 1) * k, coeff.begin());
    for (int i = 1; i <= p.n; ++i)
      out[i - 1].words[j] = poly_eval(coeff, static_cast<uint16_t>(i));
  }
  return out;
}

Value decode(const std::vector<Symbol>& symbols, const ProtocolParams& p) {
  const size_t k = static_cast<size_t>(p.t) + 1;
  std::map<int, const Symbol*> by_index;
  for (const Symbol& s : symbols) by_index.emplace(s.index, &s);
  if (by_index.size() < k) throw ArityError{};
  std::vector<const Symbol*> take;
  for (auto& [idx, sp] : by_index) {
    take.push_back(sp);
    if (take.size() == k) break;
  }
  const size_t nstripes = take[0]->words.size();
  for (const Symbol* s : take)
    if (s->words.size() != nstripes) throw DecodeFailure{};
  Candidate c = interpolate_candidate(take, nstripes);
  auto v = unframe_words(c.all_words(), p.value_bits);
  if (!v) throw DecodeFailure{};
  return *v;
}

int count_matching_symbols(const Value& v, const std::vector<Symbol>& symbols,
                           const ProtocolParams& p) {
  std::vector<Symbol> enc = encode(v, p);
  int matches = 0;
  for (const Symbol& s : symbols) {
    if (s.index < 1 || s.index > p.n) continue;
    if (enc[s.index - 1].words == s.words) ++matches;
  }
  return matches;
}

Value decode_correcting(const std::vector<Symbol>& symbols, const ProtocolParams& p) {
  const int m = static_cast<int>(symbols.size());
  if (m < 2 * p.t + 1) throw ArityError{};
  const size_t k = static_cast<size_t>(p.t) + 1;
  const int need_matches = m - p.t;

  // Symbols of a minority word-length cannot belong to the honest codeword.
  std::map<size_t, int> len_freq;
  for (const Symbol& s : symbols) len_freq[s.words.size()]++;
  size_t nstripes = 0;
  int best = 0;
  for (auto& [len, cnt] : len_freq)
    if (cnt > best) best = cnt, nstripes = len;
  std::vector<const Symbol*> usable;
  for (const Symbol& s : symbols)
    if (s.words.size() == nstripes) usable.push_back(&s);
  std::sort(usable.begin(), usable.end(),
            [](const Symbol* a, const Symbol* b) { return a->index < b->index; });
  if (usable.size() < k) throw DecodeFailure{};

  auto accept = [&](const Candidate& cand) -> std::optional<Value> {
    auto v = unframe_words(cand.all_words(), p.value_bits);
    if (!v) return std::nullopt;
    int matches = 0;
    for (const Symbol& s : symbols)
      if (s.words.size() == nstripes && cand.matches(s)) ++matches;
    if (matches < need_matches) return std::nullopt;
    return v;
  };

  if (binom(usable.size(), k, kSubsetBudget) <= kSubsetBudget) {
    // Exhaustive subset decoding: every (t+1)-subset proposes a codeword;
    // keep framing-valid candidates matching >= m-t symbols.
    std::vector<size_t> pick(k);
    for (size_t i = 0; i < k; ++i) pick[i] = i;
    std::vector<std::vector<uint8_t>> winners;
    std::vector<const Symbol*> subset(k);
    while (true) {
      for (size_t i = 0; i < k; ++i) subset[i] = usable[pick[i]];
      Candidate cand = interpolate_candidate(subset, nstripes);
      if (auto v = accept(cand)) {
        if (std::find(winners.begin(), winners.end(), v->bytes) == winners.end())
          winners.push_back(v->bytes);
      }
      // next combination
      size_t i = k;
      while (i-- > 0) {
        if (pick[i] != usable.size() - k + i) {
          ++pick[i];
          for (size_t j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
          break;
        }
        if (i == 0) {
          if (winners.size() == 1) return Value{winners[0], p.value_bits};
          throw DecodeFailure{};
        }
      }
    }
  }

  // Berlekamp-Welch on a fingerprint stripe (a fixed linear combination of
  // all stripes, itself a codeword of the same code) locates the corrupted
  // columns; the survivors erasure-decode and the result is verified whole.
  const int e = static_cast<int>((usable.size() - k) / 2);
  for (uint16_t r : {2, 3, 7, 11}) {
    std::vector<uint16_t> xs(usable.size()), ys(usable.size(), 0);
    for (size_t i = 0; i < usable.size(); ++i) {
      xs[i] = static_cast<uint16_t>(usable[i]->index);
      uint16_t rp = 1;
      for (size_t j = 0; j < nstripes; ++j) {
        ys[i] = static_cast<uint16_t>(ys[i] ^ gf16::mul(rp, usable[i]->words[j]));
        rp = gf16::mul(rp, r);
      }
    }
    // Unknowns: Q_0..Q_{k+e-1}, E_0..E_{e-1} with E_e = 1.
    // Per point: sum Q_j x^j  +  y * sum E_j x^j  =  y * x^e.
    const size_t q = k + static_cast<size_t>(e);
    std::vector<std::vector<uint16_t>> a(usable.size(), std::vector<uint16_t>(q + e, 0));
    std::vector<uint16_t> b(usable.size());
    for (size_t i = 0; i < usable.size(); ++i) {
      uint16_t xp = 1;
      for (size_t j = 0; j < q; ++j) {
        a[i][j] = xp;
        xp = gf16::mul(xp, xs[i]);
      }
      xp = 1;
      for (int j = 0; j < e; ++j) {
        a[i][q + j] = gf16::mul(ys[i], xp);
        xp = gf16::mul(xp, xs[i]);
      }
      b[i] = gf16::mul(ys[i], gf16::pow(xs[i], static_cast<uint64_t>(e)));
    }
    auto sol = solve_linear(std::move(a), std::move(b));
    if (!sol) continue;
    Poly locator(static_cast<size_t>(e) + 1);
    for (int j = 0; j < e; ++j) locator[j] = (*sol)[q + j];
    locator[e] = 1;
    std::vector<const Symbol*> good;
    for (const Symbol* s : usable)
      if (poly_eval(locator, static_cast<uint16_t>(s->index)) != 0) good.push_back(s);
    if (good.size() < k) continue;
    good.resize(k);
    Candidate cand = interpolate_candidate(good, nstripes);
    if (auto v = accept(cand)) return *v;
  }
  throw DecodeFailure{};
}

} // namespace darelab
