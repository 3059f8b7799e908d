#pragma once

#include <cassert>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "darelab/crypto.hpp"
#include "darelab/model.hpp"

namespace darelab {

class Context;

/// A per-process deterministic state machine driven by the event loop.
class IProtocol {
 public:
  virtual ~IProtocol() = default;
  virtual void on_start(Context& ctx) = 0;
  virtual void on_message(Context& ctx, const Message& m) = 0;
  virtual void on_timer(Context& ctx, uint32_t timer_id) {}
};

struct Rational {
  int64_t num = 1;
  int64_t den = 1;
};

inline Tick scale_ceil(Tick x, Rational r) { return (x * r.num + r.den - 1) / r.den; }

/// Scheduling power of the adversary. Before GST it picks delivery times and
/// per-process clock-drift factors (>= 1); after GST every delay is clamped
/// to [1, delta]. Messages in flight at GST are delivered by GST + delta.
/// Corrupt processes (at most t) run the `byzantine` protocol instead.
struct AdversaryPolicy {
  std::set<Pid> corrupt;
  std::function<Rational(Pid)> drift;
  std::function<Tick(const Message&, Tick, std::mt19937_64&)> delay;
  std::function<std::unique_ptr<IProtocol>(Pid)> byzantine;
};

struct RunObserver {
  virtual ~RunObserver() = default;
  virtual void on_send(const Message& m, Tick at) {}
  virtual void on_decide(Pid p, const ValuePtr& v, Tick at) {}
  virtual void on_acquire(Pid p, HashVal h, Tick at) {}
  virtual void on_advance(Pid p, View v, Tick at) {}
};

/// Post-GST accounting: only messages sent by correct processes at
/// time >= GST are counted.
struct SimMetrics {
  std::map<MsgKind, uint64_t> bits_by_kind;
  std::map<MsgKind, uint64_t> msgs_by_kind;
  uint64_t bits_total = 0;
  uint64_t max_correct_msg_bits = 0; // over the whole run, any time
  std::map<Pid, Tick> decision_tick;
  Tick latency = -1; // max(0, t_d - GST); -1 when some correct process never decided

  uint64_t bits_of(MsgKind k) const {
    auto it = bits_by_kind.find(k);
    return it == bits_by_kind.end() ? 0 : it->second;
  }
  uint64_t msgs_of(MsgKind k) const {
    auto it = msgs_by_kind.find(k);
    return it == msgs_by_kind.end() ? 0 : it->second;
  }
};

struct RunResult {
  SimMetrics metrics;
  bool all_decided = false;
  bool budget_exhausted = false;
  Tick end_tick = 0;
  uint64_t events = 0;
  std::map<Pid, ValuePtr> decisions;       // correct processes only
  std::map<Pid, Tick> acquire_tick;        // first disperser acquire per process
  std::vector<std::string> transcript;     // only when enabled
};

using ValidFn = std::function<bool(const Value&)>;
using ProtocolFactory = std::function<std::unique_ptr<IProtocol>(Pid)>;

/// Deterministic discrete-event simulator of the partially synchronous
/// model. Identical (params, adversary, seed) produce bit-identical runs:
/// simultaneous events are ordered by (time, receiver, kind rank, sequence).
class Simulator {
 public:
  Simulator(ProtocolParams params, AdversaryPolicy adversary, uint64_t seed, ValidFn valid);

  void set_protocol_factory(ProtocolFactory f) { factory_ = std::move(f); }
  void set_valid(ValidFn f) { valid_ = std::move(f); }
  void add_observer(RunObserver* o) { observers_.push_back(o); }
  void set_horizon(Tick t) { horizon_ = t; }
  void enable_transcript() { transcript_enabled_ = true; }
  void set_step_budget(uint64_t b) { budget_ = b; }

  RunResult run();

  const ProtocolParams& params() const { return params_; }
  CryptoRegistry& crypto() { return crypto_; }
  ProofOracle& proofs() { return proofs_; }
  bool is_correct(Pid p) const { return !adversary_.corrupt.count(p); }

 private:
  friend class Context;

  enum class EvType { Start, Deliver, TimerFire };
  struct Event {
    Tick time;
    int rank;
    Pid target;
    uint64_t seq;
    EvType type;
    Message msg;
    uint32_t timer_id = 0;
    uint64_t gen = 0;
  };
  struct EventLater {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      if (a.target != b.target) return a.target > b.target;
      if (a.rank != b.rank) return a.rank > b.rank;
      return a.seq > b.seq;
    }
  };
  struct ProcessSlot {
    std::unique_ptr<IProtocol> proto;
    bool correct = true;
  };

  void do_send(Pid from, Message m);
  void arm(Pid owner, uint32_t timer_id, Tick duration);
  void cancel(Pid owner, uint32_t timer_id);
  void record_decide(Pid p, ValuePtr v);
  void record_acquire(Pid p, HashVal h);
  void record_advance(Pid p, View v);

  ProtocolParams params_;
  AdversaryPolicy adversary_;
  ValidFn valid_;
  CryptoRegistry crypto_;
  ProofOracle proofs_;
  std::mt19937_64 rng_;
  ProtocolFactory factory_;
  std::vector<RunObserver*> observers_;
  std::priority_queue<Event, std::vector<Event>, EventLater> queue_;
  std::vector<ProcessSlot> procs_; // index pid-1
  std::map<std::pair<Pid, uint32_t>, uint64_t> timer_gen_;
  uint64_t seq_ = 0;
  Tick now_ = 0;
  Tick horizon_ = -1;
  bool transcript_enabled_ = false;
  uint64_t budget_;
  RunResult result_;
  int undecided_correct_ = 0;
};

/// Per-dispatch handle a protocol uses to act on the simulated world.
class Context {
 public:
  Context(Simulator& sim, Pid me) : sim_(sim), me_(me) {}

  Tick now() const { return sim_.now_; }
  Pid me() const { return me_; }
  const ProtocolParams& params() const { return sim_.params_; }
  CryptoRegistry& crypto() { return sim_.crypto_; }
  ProofOracle& proofs() { return sim_.proofs_; }
  bool valid(const Value& v) const { return sim_.valid_(v); }

  void send(Pid to, Message m) {
    m.sender = me_;
    m.receiver = to;
    assert(m.bits > 0 && "message size must be set by the sending module");
    sim_.do_send(me_, std::move(m));
  }

  void broadcast(Message m) {
    for (Pid p = 1; p <= sim_.params_.n; ++p) send(p, m);
  }

  void arm_timer(uint32_t timer_id, Tick duration) { sim_.arm(me_, timer_id, duration); }
  void cancel_timer(uint32_t timer_id) { sim_.cancel(me_, timer_id); }

  void note_decide(ValuePtr v) { sim_.record_decide(me_, std::move(v)); }
  void note_acquire(HashVal h) { sim_.record_acquire(me_, h); }
  void note_advance(View v) { sim_.record_advance(me_, v); }

 private:
  Simulator& sim_;
  Pid me_;
};

/// Effective delta for the k-th entered view (0-based). In unknown-delta mode
/// the timing base doubles with every entered view.
inline Tick eff_delta(const ProtocolParams& p, int entered) {
  if (!p.unknown_delta) return p.delta;
  return p.delta_guess << std::min(entered, 30);
}

} // namespace darelab
