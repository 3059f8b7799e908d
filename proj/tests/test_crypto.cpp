#include "darelab/crypto.hpp"
#include "doctest.h"

using namespace darelab;

TEST_CASE("hash oracle: deterministic and collision-free within a run") {
  CryptoRegistry reg(4);
  HashVal a = reg.hash("x");
  CHECK(reg.hash("x") == a);
  CHECK(reg.hash("y") != a);
  Value v1{{1, 2, 3}, 24}, v2{{1, 2, 4}, 24};
  CHECK(reg.hash_value(v1) == reg.hash_value(v1));
  CHECK(reg.hash_value(v1) != reg.hash_value(v2));
}

TEST_CASE("partial signatures bind signer and message") {
  CryptoRegistry reg(4);
  SigTok s = reg.share_sign(1, "x");
  CHECK(reg.verify_partial(s, 1, "x"));
  CHECK_FALSE(reg.verify_partial(s, 1, "y"));
  CHECK_FALSE(reg.verify_partial(s, 3, "x")); // P2's token never verifies as P3
  CHECK_FALSE(reg.verify_partial(12345, 1, "x safeguard")); // fabricated token
}

TEST_CASE("combine needs n-t distinct signers on one message") {
  CryptoRegistry reg(4); // t = 1, quorum = 3
  std::vector<SigTok> sigs;
  for (Pid p : {1, 2, 3}) sigs.push_back(reg.share_sign(p, "m"));
  SigTok tsig = reg.combine(sigs);
  CHECK(reg.verify_threshold("m", tsig));
  CHECK_FALSE(reg.verify_threshold("m2", tsig));
  CHECK_FALSE(reg.verify_threshold("m", 999999));

  std::vector<SigTok> two = {sigs[0], sigs[1]};
  CHECK_THROWS_AS(reg.combine(two), InsufficientQuorum);

  // distinctness: a repeated signer does not count twice
  std::vector<SigTok> dup = {sigs[0], sigs[1], reg.share_sign(1, "m")};
  CHECK_THROWS_AS(reg.combine(dup), InsufficientQuorum);

  std::vector<SigTok> mixed = {sigs[0], sigs[1], reg.share_sign(3, "other")};
  CHECK_THROWS_AS(reg.combine(mixed), MixedMessages);
}

TEST_CASE("quorum boundary is exact for t in 1..4") {
  for (int t = 1; t <= 4; ++t) {
    int n = 3 * t + 1;
    CryptoRegistry reg(n);
    std::vector<SigTok> sigs;
    for (Pid p = 1; p <= 2 * t + 1; ++p) sigs.push_back(reg.share_sign(p, "m"));
    CHECK(reg.verify_threshold("m", reg.combine(sigs)));
    sigs.pop_back();
    CHECK_THROWS_AS(reg.combine(sigs), InsufficientQuorum);
  }
}

TEST_CASE("single-signer signatures for the vector reduction") {
  CryptoRegistry reg(4);
  SigTok s = reg.sign_single(2, "proposal");
  CHECK(reg.verify_single(s, 2, "proposal"));
  CHECK_FALSE(reg.verify_single(s, 3, "proposal"));
  CHECK_FALSE(reg.verify_single(s, 2, "other"));
}
