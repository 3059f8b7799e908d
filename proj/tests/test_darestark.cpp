#include "darelab/darestark.hpp"

#include "darelab/harness.hpp"
#include "doctest.h"

using namespace darelab;

TEST_CASE("shard: (hash, encode_i) for valid values, bottom otherwise") {
  ProtocolParams p = ProtocolParams::make(4, 1024, 256, 10);
  Simulator sim(p, AdversaryPolicy{}, 1, default_validity(p));
  Context ctx(sim, 1);

  ValuePtr v = make_proposal_value(p, 1, 2);
  auto s2 = shard(ctx, 2, *v);
  REQUIRE(s2.has_value());
  CHECK(s2->first == sim.crypto().hash_value(*v));
  CHECK(s2->second == encode(*v, p)[1]);
  CHECK(shard(ctx, 2, *v) == s2); // deterministic

  Value invalid{{'X', 1, 2, 3}, p.value_bits};
  CHECK_FALSE(shard(ctx, 2, invalid).has_value());
}

TEST_CASE("proof oracle: complete for honest tuples, sound against garbage") {
  ProtocolParams p = ProtocolParams::make(4, 1024, 256, 10);
  Simulator sim(p, AdversaryPolicy{}, 1, default_validity(p));
  Context ctx(sim, 1);
  ValuePtr v = make_proposal_value(p, 1, 3);
  auto [h, s] = *shard(ctx, 3, *v);
  ProofTok proof = sim.proofs().prove(3, h, s);
  CHECK(sim.proofs().verify(3, h, s, proof));

  Symbol tampered = s;
  tampered.words[0] ^= 1;
  CHECK_FALSE(sim.proofs().verify(3, h, tampered, proof));
  CHECK_FALSE(sim.proofs().verify(2, h, s, proof));
  CHECK_FALSE(sim.proofs().verify(3, HashVal{h.id + 1}, s, proof));
  CHECK_FALSE(sim.proofs().verify(3, h, s, proof + 17)); // fabricated token
}

TEST_CASE("t+1 proof-verified shards with one hash decode to the valid preimage") {
  ProtocolParams p = ProtocolParams::make(7, 1024, 256, 10);
  Simulator sim(p, AdversaryPolicy{}, 1, default_validity(p));
  Context ctx(sim, 1);
  ValuePtr v = make_proposal_value(p, 1, 4);
  HashVal h = sim.crypto().hash_value(*v);
  std::vector<Symbol> verified;
  for (int i = 1; i <= p.t + 1; ++i) {
    auto [hh, s] = *shard(ctx, i, *v);
    ProofTok proof = sim.proofs().prove(i, hh, s);
    REQUIRE(sim.proofs().verify(i, hh, s, proof));
    REQUIRE(hh == h);
    verified.push_back(s);
  }
  Value rebuilt = decode(verified, p);
  CHECK(rebuilt == *v);
  CHECK(default_validity(p)(rebuilt));
  CHECK(sim.crypto().hash_value(rebuilt) == h);
}

TEST_CASE("fault-free run: unanimous valid decision, no full-value messages") {
  RunConfig cfg;
  cfg.protocol = Protocol::DareStark;
  cfg.scenario = Scenario::GoodCase;
  cfg.n = 4;
  cfg.L = 8192;
  RunReport rep = run_one(cfg);
  REQUIRE(rep.liveness_ok);
  REQUIRE(rep.safety_ok);
  uint64_t cap =
      rep.params.symbol_bits() + rep.params.kappa + rep.params.proof_kappa + kHeaderBits;
  CHECK(rep.metrics.max_correct_msg_bits <= cap);
  // total bits follow C1*n*L + C2*n^2*proof_kappa with small stable constants
  uint64_t n = rep.params.n;
  uint64_t budget = 4 * n * rep.params.value_bits +
                    8 * n * n * (rep.params.proof_kappa + rep.params.kappa);
  CHECK(rep.metrics.bits_total <= budget);
}

TEST_CASE("equivocating proposer cannot split the decision") {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    RunConfig cfg;
    cfg.protocol = Protocol::DareStark;
    cfg.scenario = Scenario::Equivocation;
    cfg.n = 7;
    cfg.seed = seed;
    RunReport rep = run_one(cfg);
    CHECK(rep.liveness_ok);
    CHECK(rep.safety_ok);
  }
}

TEST_CASE("corrupted retrieval symbols are rejected by proof verification") {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    RunConfig cfg;
    cfg.protocol = Protocol::DareStark;
    cfg.scenario = Scenario::RetrievalCorruption;
    cfg.n = 7;
    cfg.seed = seed;
    RunReport rep = run_one(cfg);
    CHECK(rep.liveness_ok);
    CHECK(rep.safety_ok);
  }
}
