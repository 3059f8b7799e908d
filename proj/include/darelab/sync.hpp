#pragma once

#include <functional>
#include <map>
#include <set>

#include "darelab/simnet.hpp"

namespace darelab {

/// Round-robin leader set of a view: X consecutive processes, re-indexed so
/// every process leads exactly one view in any ceil(n/X) consecutive views.
/// (The block for a view V is ((V-1) mod ceil(n/X)); the last block may hold
/// fewer than X processes when X does not divide n.)
inline std::set<Pid> leaders(View v, const ProtocolParams& p) {
  int block = static_cast<int>((v - 1) % p.leader_blocks());
  std::set<Pid> out;
  for (int j = block * p.X + 1; j <= std::min((block + 1) * p.X, p.n); ++j) out.insert(j);
  return out;
}

struct SyncConfig {
  MsgKind completed_kind = MsgKind::ViewCompleted;
  MsgKind enter_kind = MsgKind::EnterView;
  std::string domain = "sync";          // signing domain, keeps instances apart
  uint32_t timer_base = 0x10;           // +0 view timer, +1 dissemination timer
  std::function<Tick(int)> duration;    // view duration for the k-th entered view
  std::function<Tick(int)> dissemination; // dissemination wait (delta, or growing guess)
};

/// View synchronizer: brings correct processes into overlapping views.
///
/// Per entered view the process measures view_duration; on expiry it
/// broadcasts a signed view-completed. A quorum of n-t completions for some
/// V >= view_i moves the process to V+1; a valid enter-view for V > view_i
/// adopts V. Either way the process waits one dissemination period, then
/// broadcasts enter-view with the threshold signature and advances.
///
/// Guarantees (asserted by the property observer in the test suite):
///  - monotonically increasing views
///  - every correct process enters some V >= V_max by GST + 3*delta
///  - at most 3 view entries per process in [GST, GST + 3*delta)
///  - all correct processes overlap >= Delta in every view > V_max
///  - V*_sync - V_max <= ceil(n/X)
class SyncEngine {
 public:
  SyncEngine(SyncConfig cfg, std::function<void(Context&, View)> on_advance)
      : cfg_(std::move(cfg)), on_advance_(std::move(on_advance)) {}

  void start(Context& ctx) {
    if (started_) return;
    started_ = true;
    ctx.arm_timer(view_timer(), cfg_.duration(entered_));
    enter(ctx);
  }

  void stop(Context& ctx) {
    stopped_ = true;
    ctx.cancel_timer(view_timer());
    ctx.cancel_timer(dissem_timer());
  }

  View current_view() const { return view_; }
  bool stopped() const { return stopped_; }
  int entered_count() const { return entered_; }

  bool handle_message(Context& ctx, const Message& m) {
    if (m.kind != cfg_.completed_kind && m.kind != cfg_.enter_kind) return false;
    if (stopped_ || !started_) return true;
    if (m.kind == cfg_.completed_kind) {
      if (!ctx.crypto().verify_partial(m.psig, m.sender, completed_msg(m.view))) return true;
      if (m.view < view_) return true;
      auto& sigs = completed_[m.view];
      sigs.emplace(m.sender, m.psig);
      if (static_cast<int>(sigs.size()) >= ctx.params().quorum()) {
        std::vector<SigTok> parts;
        for (auto& [pid, tok] : sigs) parts.push_back(tok);
        view_sig_ = ctx.crypto().combine(parts);
        move_to(ctx, m.view + 1);
      }
    } else {
      if (m.view <= view_) return true;
      if (!ctx.crypto().verify_threshold(completed_msg(m.view - 1), m.tsig)) return true;
      view_sig_ = m.tsig;
      move_to(ctx, m.view);
    }
    return true;
  }

  bool handle_timer(Context& ctx, uint32_t id) {
    if (id != view_timer() && id != dissem_timer()) return false;
    if (stopped_) return true;
    if (id == view_timer()) {
      Message m;
      m.kind = cfg_.completed_kind;
      m.view = view_;
      m.psig = ctx.crypto().share_sign(ctx.me(), completed_msg(view_));
      m.bits = bit_size(m.kind, ctx.params());
      ctx.broadcast(m);
    } else {
      Message m;
      m.kind = cfg_.enter_kind;
      m.view = view_;
      m.tsig = view_sig_;
      m.bits = bit_size(m.kind, ctx.params());
      ctx.broadcast(m);
      ctx.arm_timer(view_timer(), cfg_.duration(entered_));
      enter(ctx);
    }
    return true;
  }

 private:
  uint32_t view_timer() const { return cfg_.timer_base; }
  uint32_t dissem_timer() const { return cfg_.timer_base + 1; }

  std::string completed_msg(View v) const { return cfg_.domain + "|vc|" + std::to_string(v); }

  void move_to(Context& ctx, View v) {
    view_ = v;
    completed_.erase(completed_.begin(), completed_.lower_bound(view_));
    ctx.cancel_timer(view_timer());
    ctx.cancel_timer(dissem_timer());
    ctx.arm_timer(dissem_timer(), cfg_.dissemination(entered_));
  }

  void enter(Context& ctx) {
    ++entered_;
    ctx.note_advance(view_);
    on_advance_(ctx, view_);
  }

  SyncConfig cfg_;
  std::function<void(Context&, View)> on_advance_;
  View view_ = 1;
  SigTok view_sig_ = 0;
  bool started_ = false;
  bool stopped_ = false;
  int entered_ = 0;
  std::map<View, std::map<Pid, SigTok>> completed_;
};

/// Disperser-flavoured Sync configuration: view_duration = Delta + 2*delta.
inline SyncConfig make_view_sync_config(const ProtocolParams& p) {
  SyncConfig cfg;
  cfg.completed_kind = MsgKind::ViewCompleted;
  cfg.enter_kind = MsgKind::EnterView;
  cfg.domain = "sync";
  cfg.timer_base = 0x10;
  cfg.duration = [p](int entered) {
    Tick d = eff_delta(p, entered);
    return d * p.groups() + 5 * d;
  };
  cfg.dissemination = [p](int entered) { return eff_delta(p, entered); };
  return cfg;
}

} // namespace darelab
