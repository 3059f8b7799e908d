#pragma once

#include "darelab/sync.hpp"

namespace darelab {

/// View-based value dispersal. Produces an acquired (hash, threshold
/// signature) pair proving the value is valid and retrievable.
///
///  - Integrity: every acquired pair verifies.
///  - Redundancy: a valid pair for h implies >= t+1 correct processes hold a
///    valid value with that hash.
///  - Termination: every correct process eventually acquires (first CONFIRM
///    wins; the pair is echoed once, then Disperser and Sync halt).
///
/// Leaders of the current view send DISPERSAL to Y-sized groups paced one
/// dissemination period apart; a view change cancels the remaining groups.
struct DisperserOptions {
  // Byzantine knob: leaders send a different (valid) value per group.
  bool equivocate = false;
};

class Disperser {
 public:
  using Options = DisperserOptions;

  Disperser(const ProtocolParams& p, std::function<void(Context&, HashVal, SigTok)> on_acquire,
            Options opt = {})
      : on_acquire_(std::move(on_acquire)),
        opt_(opt),
        params_(p),
        sync_(std::make_unique<SyncEngine>(make_view_sync_config(p),
                                           [this](Context& ctx, View v) { on_advance(ctx, v); })) {}

  void disperse(Context& ctx, ValuePtr v) {
    if (dispersed_) throw std::logic_error("disperse invoked twice");
    if (!ctx.valid(*v)) throw std::logic_error("disperse precondition: valid(v) must hold");
    dispersed_ = true;
    proposal_ = std::move(v);
    if (opt_.equivocate) make_equivocation_twin(ctx);
    sync_->start(ctx);
  }

  bool handle_message(Context& ctx, const Message& m) {
    if (sync_->handle_message(ctx, m)) return true;
    switch (m.kind) {
      case MsgKind::Dispersal: on_dispersal(ctx, m); return true;
      case MsgKind::Ack: on_ack(ctx, m); return true;
      case MsgKind::Confirm: on_confirm(ctx, m); return true;
      default: return false;
    }
  }

  bool handle_timer(Context& ctx, uint32_t id) {
    if (sync_->handle_timer(ctx, id)) return true;
    if (id != kPacingTimer) return false;
    if (!stopped_) send_group(ctx);
    return true;
  }

  bool acquired() const { return acquired_; }
  HashVal acquired_hash() const { return acquired_hash_; }
  SigTok acquired_sig() const { return acquired_sig_; }
  bool stopped() const { return stopped_; }

  /// Values stored while acking dispersals; read by DARE at decide time.
  const std::map<HashVal, ValuePtr>& obtained() const { return obtained_; }

  static constexpr uint32_t kPacingTimer = 0x20;

 private:
  void on_advance(Context& ctx, View v) {
    view_ = v;
    ctx.cancel_timer(kPacingTimer); // stop participating in the previous view
    group_ = 0;
    if (!leaders(v, params_).count(ctx.me())) return;
    send_group(ctx);
  }

  void send_group(Context& ctx) {
    ++group_;
    if (group_ > params_.groups()) return;
    Message m;
    m.kind = MsgKind::Dispersal;
    m.view = view_;
    m.value = pick_value(group_);
    m.bits = bit_size(m.kind, params_);
    for (int j = (group_ - 1) * params_.Y + 1; j <= std::min(group_ * params_.Y, params_.n); ++j)
      ctx.send(j, m);
    if (group_ < params_.groups())
      ctx.arm_timer(kPacingTimer, eff_delta(params_, sync_->entered_count()));
  }

  void on_dispersal(Context& ctx, const Message& m) {
    if (stopped_ || !m.value) return;
    if (!leaders(view_, params_).count(m.sender)) return; // wrong-view sender
    if (!ctx.valid(*m.value)) return;
    HashVal h = ctx.crypto().hash_value(*m.value);
    obtained_[h] = m.value;
    Message ack;
    ack.kind = MsgKind::Ack;
    ack.hash = h;
    ack.psig = ctx.crypto().share_sign(ctx.me(), sig_msg_hash(h));
    ack.bits = bit_size(ack.kind, params_);
    ctx.send(m.sender, ack);
  }

  void on_ack(Context& ctx, const Message& m) {
    if (stopped_) return;
    if (!ctx.crypto().verify_partial(m.psig, m.sender, sig_msg_hash(m.hash))) return;
    auto& sigs = acks_[m.hash];
    sigs.emplace(m.sender, m.psig);
    if (static_cast<int>(sigs.size()) < params_.quorum() || confirmed_.count(m.hash)) return;
    confirmed_.insert(m.hash);
    std::vector<SigTok> parts;
    for (auto& [pid, tok] : sigs) parts.push_back(tok);
    Message c;
    c.kind = MsgKind::Confirm;
    c.hash = m.hash;
    c.tsig = ctx.crypto().combine(parts);
    c.bits = bit_size(c.kind, params_);
    ctx.broadcast(c);
  }

  void on_confirm(Context& ctx, const Message& m) {
    if (stopped_) return;
    if (!ctx.crypto().verify_threshold(sig_msg_hash(m.hash), m.tsig)) return;
    acquired_ = true;
    acquired_hash_ = m.hash;
    acquired_sig_ = m.tsig;
    ctx.note_acquire(m.hash);
    Message echo = m;
    echo.bits = bit_size(echo.kind, params_);
    ctx.broadcast(echo);
    stopped_ = true;
    ctx.cancel_timer(kPacingTimer);
    sync_->stop(ctx);
    on_acquire_(ctx, acquired_hash_, acquired_sig_);
  }

  ValuePtr pick_value(int group) const {
    if (opt_.equivocate && group % 2 == 0 && twin_) return twin_;
    return proposal_;
  }

  void make_equivocation_twin(Context& ctx) {
    auto twin = std::make_shared<Value>(*proposal_);
    if (twin->bytes.size() > 1) twin->bytes[1] ^= 0xFF;
    twin_ = std::move(twin);
  }

  std::function<void(Context&, HashVal, SigTok)> on_acquire_;
  Options opt_;
  ProtocolParams params_;
  std::unique_ptr<SyncEngine> sync_;
  ValuePtr proposal_;
  ValuePtr twin_;
  bool dispersed_ = false;
  bool stopped_ = false;
  bool acquired_ = false;
  HashVal acquired_hash_;
  SigTok acquired_sig_ = 0;
  View view_ = 0;
  int group_ = 0;
  std::map<HashVal, ValuePtr> obtained_;
  std::map<HashVal, std::map<Pid, SigTok>> acks_;
  std::set<HashVal> confirmed_;
};

} // namespace darelab
