#include "darelab/simnet.hpp"

#include <algorithm>

namespace darelab {

namespace {

uint64_t default_budget() {
  if (const char* env = std::getenv("DARE_LAB_STEP_BUDGET")) {
    uint64_t v = std::strtoull(env, nullptr, 10);
    if (v > 0) return v;
  }
  return 4'000'000;
}

} // namespace

Simulator::Simulator(ProtocolParams params, AdversaryPolicy adversary, uint64_t seed, ValidFn valid)
    : params_(std::move(params)),
      adversary_(std::move(adversary)),
      valid_(std::move(valid)),
      crypto_(params_.n),
      rng_(seed),
      budget_(default_budget()) {
  params_.validate();
  if (static_cast<int>(adversary_.corrupt.size()) > params_.t)
    throw std::invalid_argument("adversary corrupts more than t processes");
  procs_.resize(params_.n);
  for (Pid p = 1; p <= params_.n; ++p) procs_[p - 1].correct = is_correct(p);
}

void Simulator::do_send(Pid from, Message m) {
  m.bits = std::max<uint64_t>(m.bits, 1);
  const Tick sent = now_;
  if (procs_[from - 1].correct) {
    result_.metrics.max_correct_msg_bits = std::max(result_.metrics.max_correct_msg_bits, m.bits);
    if (sent >= params_.gst) {
      result_.metrics.bits_by_kind[m.kind] += m.bits;
      result_.metrics.msgs_by_kind[m.kind] += 1;
      result_.metrics.bits_total += m.bits;
    }
  }
  if (transcript_enabled_) {
    result_.transcript.push_back(std::to_string(sent) + "|" + std::to_string(m.sender) + "|" +
                                 std::to_string(m.receiver) + "|" + kind_name(m.kind) + "|" +
                                 std::to_string(m.bits));
  }
  for (RunObserver* o : observers_) o->on_send(m, sent);

  Tick deliver;
  if (m.receiver == m.sender) {
    deliver = sent; // local steps take zero time; ordered after the current event
  } else if (sent >= params_.gst) {
    Tick raw = adversary_.delay ? adversary_.delay(m, sent, rng_) : sent + params_.delta;
    deliver = std::clamp<Tick>(raw, sent + 1, sent + params_.delta);
  } else {
    Tick raw = adversary_.delay ? adversary_.delay(m, sent, rng_) : sent + params_.delta;
    // reliable network: pre-GST sends are in flight no later than GST + delta
    deliver = std::clamp<Tick>(raw, sent + 1, params_.gst + params_.delta);
  }
  queue_.push(Event{deliver, static_cast<int>(m.kind), m.receiver, seq_++, EvType::Deliver,
                    std::move(m)});
}

void Simulator::arm(Pid owner, uint32_t timer_id, Tick duration) {
  uint64_t gen = timer_gen_[{owner, timer_id}];
  Tick expiry;
  if (now_ < params_.gst) {
    // The local clock runs slow (factor num/den >= 1) until GST and exactly
    // thereafter; only the pre-GST portion of the wait is stretched.
    Rational r = adversary_.drift ? adversary_.drift(owner) : Rational{1, 1};
    Tick local_by_gst = (params_.gst - now_) * r.den / r.num;
    if (local_by_gst >= duration)
      expiry = now_ + scale_ceil(duration, r);
    else
      expiry = params_.gst + (duration - local_by_gst);
  } else {
    expiry = now_ + duration;
  }
  Event ev{expiry, 100000 + static_cast<int>(timer_id), owner, seq_++, EvType::TimerFire};
  ev.timer_id = timer_id;
  ev.gen = gen;
  queue_.push(std::move(ev));
}

void Simulator::cancel(Pid owner, uint32_t timer_id) { timer_gen_[{owner, timer_id}]++; }

void Simulator::record_decide(Pid p, ValuePtr v) {
  if (result_.metrics.decision_tick.count(p)) return;
  result_.metrics.decision_tick[p] = now_;
  if (procs_[p - 1].correct) {
    result_.decisions[p] = v;
    --undecided_correct_;
  }
  for (RunObserver* o : observers_) o->on_decide(p, v, now_);
}

void Simulator::record_acquire(Pid p, HashVal h) {
  result_.acquire_tick.emplace(p, now_);
  for (RunObserver* o : observers_) o->on_acquire(p, h, now_);
}

void Simulator::record_advance(Pid p, View v) {
  for (RunObserver* o : observers_) o->on_advance(p, v, now_);
}

RunResult Simulator::run() {
  undecided_correct_ = 0;
  for (Pid p = 1; p <= params_.n; ++p) {
    ProcessSlot& slot = procs_[p - 1];
    if (!slot.correct && adversary_.byzantine)
      slot.proto = adversary_.byzantine(p);
    else
      slot.proto = factory_(p);
    if (slot.correct) ++undecided_correct_;
    queue_.push(Event{0, -1, p, seq_++, EvType::Start});
  }

  while (!queue_.empty()) {
    if (result_.events >= budget_) {
      result_.budget_exhausted = true;
      break;
    }
    Event ev = queue_.top();
    queue_.pop();
    if (horizon_ >= 0 && ev.time > horizon_) break;
    now_ = std::max(now_, ev.time);
    ++result_.events;

    ProcessSlot& slot = procs_[ev.target - 1];
    Context ctx(*this, ev.target);
    switch (ev.type) {
      case EvType::Start: slot.proto->on_start(ctx); break;
      case EvType::Deliver: slot.proto->on_message(ctx, ev.msg); break;
      case EvType::TimerFire:
        if (timer_gen_[{ev.target, ev.timer_id}] == ev.gen) slot.proto->on_timer(ctx, ev.timer_id);
        break;
    }
  }

  result_.all_decided = undecided_correct_ == 0;
  result_.end_tick = now_;
  if (result_.all_decided) {
    Tick t_d = 0;
    for (Pid p = 1; p <= params_.n; ++p)
      if (procs_[p - 1].correct) t_d = std::max(t_d, result_.metrics.decision_tick[p]);
    result_.metrics.latency = std::max<Tick>(0, t_d - params_.gst);
  }
  return std::move(result_);
}

} // namespace darelab
