#include "darelab/dare.hpp"

#include "darelab/harness.hpp"
#include "doctest.h"

using namespace darelab;

namespace {

RunReport run(Protocol proto, Scenario scen, int n, uint64_t seed = 1, uint64_t L = 8192) {
  RunConfig cfg;
  cfg.protocol = proto;
  cfg.scenario = scen;
  cfg.n = n;
  cfg.L = L;
  cfg.seed = seed;
  return run_one(cfg);
}

} // namespace

TEST_CASE("fault-free run decides a dispersed proposal unanimously") {
  RunReport rep = run(Protocol::Dare, Scenario::GoodCase, 4);
  REQUIRE(rep.liveness_ok);
  REQUIRE(rep.safety_ok);
  REQUIRE(!rep.decisions.empty());
  ValuePtr decided = rep.decisions.begin()->second;
  bool is_some_proposal = false;
  for (Pid q = 1; q <= 4; ++q)
    if (*decided == *make_proposal_value(rep.params, q, rep.cfg.seed)) is_some_proposal = true;
  CHECK(is_some_proposal);
}

TEST_CASE("t silent Byzantine processes: correct processes still decide") {
  for (int n : {4, 7, 10}) {
    RunReport rep = run(Protocol::Dare, Scenario::SilentFaults, n);
    CHECK(rep.liveness_ok);
    CHECK(rep.safety_ok);
    CHECK(int(rep.decisions.size()) == n - rep.params.t);
  }
}

TEST_CASE("equivocating dispersal leaders cannot break agreement or validity") {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    RunReport rep = run(Protocol::Dare, Scenario::Equivocation, 7, seed);
    CHECK(rep.liveness_ok);
    CHECK(rep.safety_ok);
  }
}

TEST_CASE("adversarial shift: decision reached, dispersal count bounded") {
  for (int n : {4, 16}) {
    RunReport rep = run(Protocol::Dare, Scenario::AdversarialShift, n);
    CHECK(rep.liveness_ok);
    CHECK(rep.safety_ok);
    CHECK(rep.dispersal_msgs <= uint64_t(3 * rep.params.X * rep.params.n));
  }
}

TEST_CASE("pre-GST chaos: the composition still terminates cleanly") {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    RunReport rep = run(Protocol::Dare, Scenario::PreGstChaos, 7, seed);
    CHECK(rep.liveness_ok);
    CHECK(rep.safety_ok);
  }
}

TEST_CASE("retrieval-phase garbage from Byzantine processes is tolerated") {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    RunReport rep = run(Protocol::Dare, Scenario::RetrievalCorruption, 7, seed);
    CHECK(rep.liveness_ok);
    CHECK(rep.safety_ok);
  }
}

TEST_CASE("good-case latency and bit shape at n=16") {
  RunReport rep = run(Protocol::Dare, Scenario::GoodCase, 16);
  REQUIRE(rep.liveness_ok);
  CHECK(rep.max_acquire <= 70);                   // Delta = delta*sqrt(n) + 3*delta
  CHECK(rep.metrics.latency <= (4 + 20) * 10);    // (sqrt(n) + 20) * delta
  CHECK(rep.dispersal_msgs == 64);                // X * n full-pacing dispersal term
  CHECK(rep.sync_bits <= 16ull * 16 * 256);       // no synchronizer term beyond one view
  // one acquire per correct process, all within delta of the first
  CHECK(rep.acquirers == 16);
  CHECK(rep.max_acquire - rep.min_acquire <= 10);
  // retrieval stays within n symbol messages per process for each phase
  CHECK(rep.metrics.msgs_of(MsgKind::SymbolShare) <= 16 * 16);
  CHECK(rep.metrics.msgs_of(MsgKind::SymbolBcast) <= 16 * 16);
}

TEST_CASE("unknown-delta mode still decides") {
  RunConfig cfg;
  cfg.protocol = Protocol::Dare;
  cfg.scenario = Scenario::GoodCase;
  cfg.n = 4;
  cfg.unknown_delta = true;
  cfg.delta_guess = 2;
  RunReport rep = run_one(cfg);
  CHECK(rep.liveness_ok);
  CHECK(rep.safety_ok);
}

TEST_CASE("runs are reproducible: same seed, same metrics and decisions") {
  RunReport a = run(Protocol::Dare, Scenario::PreGstChaos, 7, 99);
  RunReport b = run(Protocol::Dare, Scenario::PreGstChaos, 7, 99);
  CHECK(a.metrics.bits_total == b.metrics.bits_total);
  CHECK(a.metrics.latency == b.metrics.latency);
  CHECK(csv_row(a) == csv_row(b));
}
