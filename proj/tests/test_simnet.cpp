#include "darelab/simnet.hpp"

#include "doctest.h"

using namespace darelab;

namespace {

struct PingLog {
  std::map<Pid, std::vector<std::pair<Tick, Pid>>> deliveries; // Ack deliveries
  std::map<Pid, std::vector<Tick>> timer_ticks;
};

// Minimal protocol: everyone broadcasts one ping at start and a pong timer
// fires after 3*delta; used to probe scheduling rules.
class PingProcess : public IProtocol {
 public:
  explicit PingProcess(PingLog* log) : log_(log) {}
  void on_start(Context& ctx) override {
    Message m;
    m.kind = MsgKind::Ack;
    m.bits = bit_size(m.kind, ctx.params());
    ctx.broadcast(m);
    ctx.arm_timer(1, 3 * ctx.params().delta);
  }
  void on_message(Context& ctx, const Message& m) override {
    if (m.kind == MsgKind::Ack && log_) log_->deliveries[ctx.me()].push_back({ctx.now(), m.sender});
    if (!replied && m.sender != ctx.me() && m.kind == MsgKind::Ack) {
      replied = true;
      Message r;
      r.kind = MsgKind::Confirm;
      r.bits = bit_size(r.kind, ctx.params());
      ctx.send(m.sender, r);
    }
  }
  void on_timer(Context& ctx, uint32_t) override {
    if (log_) log_->timer_ticks[ctx.me()].push_back(ctx.now());
    if (!decided_) {
      decided_ = true;
      ctx.note_decide(nullptr);
    }
  }

 private:
  PingLog* log_;
  bool replied = false;
  bool decided_ = false;
};

RunResult ping_run(ProtocolParams p, AdversaryPolicy adv, uint64_t seed, PingLog* log = nullptr) {
  Simulator sim(p, std::move(adv), seed, [](const Value&) { return true; });
  sim.set_protocol_factory([log](Pid) { return std::make_unique<PingProcess>(log); });
  sim.enable_transcript();
  return sim.run();
}

} // namespace

TEST_CASE("identical (params, adversary, seed) produce identical transcripts") {
  ProtocolParams p = ProtocolParams::make(4, 1024, 256, 10);
  p.gst = 30;
  AdversaryPolicy adv;
  adv.delay = [](const Message&, Tick sent, std::mt19937_64& rng) {
    return sent + 1 + Tick(rng() % 9);
  };
  auto a = ping_run(p, adv, 42);
  auto b = ping_run(p, adv, 42);
  CHECK(a.transcript == b.transcript);
  auto c = ping_run(p, adv, 43);
  CHECK(a.transcript != c.transcript);
}

TEST_CASE("post-GST delivery is bounded by delta") {
  ProtocolParams p = ProtocolParams::make(4, 1024, 256, 10);
  p.gst = 0;
  AdversaryPolicy adv;
  adv.delay = [](const Message&, Tick sent, std::mt19937_64&) {
    return sent + 1000; // adversary asks for a huge delay; the bound wins
  };
  PingLog log;
  ping_run(p, adv, 1, &log);
  for (Pid q = 1; q <= 4; ++q)
    for (auto& [tick, sender] : log.deliveries[q])
      CHECK(tick <= (sender == q ? 0 : p.delta));
}

TEST_CASE("pre-GST in-flight messages arrive by GST + delta") {
  ProtocolParams p = ProtocolParams::make(4, 1024, 256, 10);
  p.gst = 50;
  AdversaryPolicy adv;
  adv.delay = [](const Message&, Tick sent, std::mt19937_64&) -> Tick {
    return sent + 100000;
  };
  PingLog log;
  ping_run(p, adv, 1, &log);
  for (Pid q = 1; q <= 4; ++q)
    for (auto& [tick, sender] : log.deliveries[q])
      if (sender != q) CHECK(tick == p.gst + p.delta); // sent at 0 < GST
}

TEST_CASE("timers drift only before GST") {
  ProtocolParams p = ProtocolParams::make(4, 1024, 256, 10);
  AdversaryPolicy adv;
  adv.drift = [](Pid q) { return q == 1 ? Rational{3, 1} : Rational{1, 1}; };

  SUBCASE("armed before GST: scaled by the drift factor") {
    ProtocolParams pre = p;
    pre.gst = 1000;
    PingLog log;
    ping_run(pre, adv, 1, &log);
    CHECK(log.timer_ticks[1].at(0) == 90); // 30 * 3
    CHECK(log.timer_ticks[2].at(0) == 30);
  }
  SUBCASE("armed after GST: exact") {
    ProtocolParams post = p;
    post.gst = 0;
    PingLog log;
    ping_run(post, adv, 1, &log);
    CHECK(log.timer_ticks[1].at(0) == 30);
  }
}

TEST_CASE("metrics count only post-GST sends by correct processes") {
  ProtocolParams p = ProtocolParams::make(4, 1024, 256, 10);
  p.gst = 5; // the initial broadcasts at tick 0 are pre-GST
  AdversaryPolicy adv;
  adv.corrupt = {4};
  adv.byzantine = [](Pid) {
    struct Spammer : IProtocol {
      void on_start(Context& ctx) override {
        Message m;
        m.kind = MsgKind::Ack;
        m.bits = bit_size(m.kind, ctx.params());
        ctx.arm_timer(1, 100);
        ctx.broadcast(m);
      }
      void on_message(Context&, const Message&) override {}
      void on_timer(Context& ctx, uint32_t) override {
        Message m;
        m.kind = MsgKind::Ack;
        m.bits = bit_size(m.kind, ctx.params());
        ctx.broadcast(m); // post-GST but Byzantine: not counted
        ctx.note_decide(nullptr);
      }
    };
    return std::make_unique<Spammer>();
  };
  auto res = ping_run(p, adv, 1);
  // pings at tick 0 are pre-GST; only the correct replies (Confirm) count
  CHECK(res.metrics.msgs_of(MsgKind::Ack) == 0);
  CHECK(res.metrics.msgs_of(MsgKind::Confirm) == 3);
}
