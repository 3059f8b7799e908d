#include "darelab/erasure.hpp"

#include <random>

#include "doctest.h"
#include "support.hpp"

using namespace darelab;
using namespace darelab::testing;

TEST_CASE("encode shape and determinism") {
  ProtocolParams p = ProtocolParams::make(4, 1024, 256, 10);
  std::mt19937_64 rng(7);
  Value v = random_value(p, rng);
  auto symbols = encode(v, p);
  CHECK(symbols.size() == 4);
  CHECK(p.symbol_bits() == 512); // ceil(L/(t+1))
  for (int i = 0; i < 4; ++i) CHECK(symbols[i].index == i + 1);
  CHECK(encode(v, p) == symbols);

  Value empty;
  CHECK_THROWS_AS(encode(empty, p), LayoutError);
}

TEST_CASE("any t+1 symbols reconstruct the value (MDS)") {
  ProtocolParams p = ProtocolParams::make(4, 1024, 256, 10);
  std::mt19937_64 rng(8);
  Value v = random_value(p, rng);
  auto symbols = encode(v, p);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      Value got = decode({symbols[i], symbols[j]}, p);
      CHECK(got == v);
    }
  CHECK_THROWS_AS(decode({symbols[0]}, p), ArityError);
}

TEST_CASE("decode agrees with an independent interpolation oracle") {
  ProtocolParams p = ProtocolParams::make(7, 1024, 256, 10);
  std::mt19937_64 rng(9);
  for (int round = 0; round < 50; ++round) {
    Value v = random_value(p, rng);
    auto symbols = encode(v, p);
    std::vector<Symbol> pickled;
    std::vector<int> idx = {0, 1, 2, 3, 4, 5, 6};
    std::shuffle(idx.begin(), idx.end(), rng);
    for (int i = 0; i < p.t + 1; ++i) pickled.push_back(symbols[idx[i]]);
    Value got = decode(pickled, p);
    auto oracle = oracle_decode(pickled, p);
    REQUIRE(oracle.has_value());
    CHECK(got == *oracle);
    CHECK(got == v);
  }
}

TEST_CASE("decode_correcting recovers from garbage symbols") {
  ProtocolParams p = ProtocolParams::make(4, 1024, 256, 10);
  std::mt19937_64 rng(10);
  Value v = random_value(p, rng);
  auto symbols = encode(v, p);

  SUBCASE("one symbol replaced by garbage among 2t+1") {
    std::vector<Symbol> s = {symbols[0], symbols[1], symbols[2]};
    for (auto& w : s[2].words) w = uint16_t(rng());
    CHECK(decode_correcting(s, p) == v);
  }
  SUBCASE("all honest degenerates to decode") {
    std::vector<Symbol> s = {symbols[0], symbols[1], symbols[2]};
    CHECK(decode_correcting(s, p) == v);
  }
  SUBCASE("insufficient arity") {
    std::vector<Symbol> s = {symbols[0], symbols[1]};
    CHECK_THROWS_AS(decode_correcting(s, p), ArityError);
  }
}

TEST_CASE("exhaustive error patterns at n=7 match the subset oracle") {
  ProtocolParams p = ProtocolParams::make(7, 1024, 256, 10);
  std::mt19937_64 rng(11);
  for (int round = 0; round < 40; ++round) {
    Value v = random_value(p, rng);
    auto symbols = encode(v, p);
    std::vector<Symbol> base(symbols.begin(), symbols.begin() + 2 * p.t + 1);
    // every corruption pattern of size <= t among the 2t+1 symbols
    for (int mask = 0; mask < (1 << (2 * p.t + 1)); ++mask) {
      if (__builtin_popcount(mask) > p.t) continue;
      std::vector<Symbol> s = base;
      for (int i = 0; i < 2 * p.t + 1; ++i)
        if (mask & (1 << i))
          for (auto& w : s[i].words) w = uint16_t(rng());
      Value got = decode_correcting(s, p);
      auto oracle = oracle_decode_correcting(s, p);
      REQUIRE(oracle.has_value());
      CHECK(got == *oracle);
      CHECK(got == v);
    }
  }
}

TEST_CASE("berlekamp-welch path handles large symbol sets") {
  // n = 49 exceeds the exhaustive-subset budget, forcing the locator path.
  ProtocolParams p = ProtocolParams::make(49, 1 << 17, 256, 10);
  std::mt19937_64 rng(12);
  Value v = random_value(p, rng);
  auto symbols = encode(v, p);
  std::vector<Symbol> s(symbols.begin(), symbols.end());
  for (int i = 0; i < p.t; ++i)
    for (auto& w : s[3 * i].words) w = uint16_t(rng());
  CHECK(decode_correcting(s, p) == v);

  // and with exactly 2t+1 honest symbols plus t corrupted ones
  std::vector<Symbol> mixed(symbols.begin(), symbols.begin() + 2 * p.t + 1);
  for (int i = 0; i < p.t; ++i) {
    Symbol bad = symbols[2 * p.t + 1 + i];
    for (auto& w : bad.words) w = uint16_t(rng());
    mixed.push_back(bad);
  }
  CHECK(decode_correcting(mixed, p) == v);
}
