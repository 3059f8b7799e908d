#include "darelab/retriever.hpp"

#include "darelab/harness.hpp"
#include "doctest.h"

using namespace darelab;

namespace {

class RetrieverHarnessProcess : public IProtocol {
 public:
  RetrieverHarnessProcess(const ProtocolParams& p, ValuePtr input, bool garbage = false)
      : input_(std::move(input)),
        retr_(p, [](Context& ctx, ValuePtr v) { ctx.note_decide(std::move(v)); },
              Retriever::Options{garbage}) {}
  void on_start(Context& ctx) override { retr_.input(ctx, input_); }
  void on_message(Context& ctx, const Message& m) override { retr_.handle_message(ctx, m); }

 private:
  ValuePtr input_;
  Retriever retr_;
};

} // namespace

TEST_CASE("all correct input v: all output v") {
  ProtocolParams p = ProtocolParams::make(4, 1024, 256, 10);
  ValuePtr v = make_proposal_value(p, 1, 3);
  Simulator sim(p, AdversaryPolicy{}, 1, default_validity(p));
  sim.set_protocol_factory(
      [&](Pid) { return std::make_unique<RetrieverHarnessProcess>(p, v); });
  RunResult res = sim.run();
  REQUIRE(res.all_decided);
  for (auto& [pid, out] : res.decisions) CHECK(*out == *v);
}

TEST_CASE("exactly t+1 holders, Byzantine garbage: everyone outputs v") {
  for (int n : {4, 7}) {
    for (uint64_t seed = 1; seed <= 5; ++seed) {
      SimpleReport rep = run_retriever_boundary(n, seed, 10, 1024);
      if (!rep.ok) MESSAGE("n ", n, " seed ", seed, ": ", rep.detail);
      CHECK(rep.ok);
    }
  }
}

TEST_CASE("a share is broadcast after t+1 identical copies, duplicates counted once") {
  ProtocolParams p = ProtocolParams::make(4, 1024, 256, 10);
  AdversaryPolicy adv;
  Simulator sim(p, adv, 1, default_validity(p));
  sim.enable_transcript();
  Context ctx(sim, 3);
  int outputs = 0;
  Retriever r(p, [&](Context&, ValuePtr) { ++outputs; });
  r.input(ctx, nullptr); // P3 holds bottom

  ValuePtr v = make_proposal_value(p, 1, 4);
  auto symbols = encode(*v, p);
  auto share_from = [&](Pid sender) {
    Message m;
    m.kind = MsgKind::SymbolShare;
    m.sender = sender;
    m.receiver = 3;
    m.symbol = symbols[2]; // index 3
    m.bits = 1;
    r.handle_message(ctx, m);
  };
  share_from(1);
  share_from(1); // duplicate sender: still below t+1 = 2 distinct
  // a share for someone else's index is ignored
  Message wrong;
  wrong.kind = MsgKind::SymbolShare;
  wrong.sender = 2;
  wrong.receiver = 3;
  wrong.symbol = symbols[1];
  wrong.bits = 1;
  r.handle_message(ctx, wrong);

  share_from(2); // second distinct sender triggers the broadcast
  // the broadcast went into the queue; feed P3 its own copy back plus the
  // other three to reach 2t+1 broadcast symbols and decode
  for (Pid q : {1, 2, 4}) {
    Message m;
    m.kind = MsgKind::SymbolBcast;
    m.sender = q;
    m.receiver = 3;
    m.symbol = symbols[q - 1];
    m.bits = 1;
    r.handle_message(ctx, m);
  }
  CHECK(outputs == 1);
}

TEST_CASE("decode waits until the rebuilt value matches 2t+1 broadcast symbols") {
  ProtocolParams p = ProtocolParams::make(4, 1024, 256, 10);
  AdversaryPolicy adv;
  Simulator sim(p, adv, 1, default_validity(p));
  Context ctx(sim, 1);
  int outputs = 0;
  Retriever r(p, [&](Context&, ValuePtr out) { ++outputs; });
  r.input(ctx, nullptr);

  ValuePtr v = make_proposal_value(p, 1, 5);
  auto symbols = encode(*v, p);
  Symbol garbage = symbols[3];
  for (auto& w : garbage.words) w ^= 0xBEEF;

  auto bcast = [&](Pid q, const Symbol& s) {
    Message m;
    m.kind = MsgKind::SymbolBcast;
    m.sender = q;
    m.receiver = 1;
    m.symbol = s;
    m.symbol.index = q;
    m.bits = 1;
    r.handle_message(ctx, m);
  };

  // two honest symbols + one garbage: a candidate may decode but cannot
  // match 2t+1 = 3 of the received symbols, so no output yet
  bcast(1, symbols[0]);
  bcast(2, symbols[1]);
  Symbol g = garbage;
  g.index = 4;
  bcast(4, g);
  CHECK(outputs == 0);

  bcast(3, symbols[2]); // third honest symbol arrives
  CHECK(outputs == 1);
}
