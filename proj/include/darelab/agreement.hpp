#pragma once

#include <optional>

#include "darelab/sync.hpp"

namespace darelab {

/// Leader round-robin for single-leader agreement views.
inline Pid agr_leader(View v, int n) { return static_cast<Pid>((v - 1) % n) + 1; }

/// What the engine agrees on: either a (hash, threshold signature) pair with
/// validity verify_sig (DARE's agreement) or a full value with the external
/// validity predicate (baseline strawman).
struct AgrPayload {
  bool is_value = false;
  HashVal h;
  SigTok sig = 0;
  ValuePtr value;
};

struct AgreementKinds {
  MsgKind status, propose, prepare_vote, prepare_qc, commit_vote, commit_qc;
  MsgKind epoch_completed, enter_epoch;
  bool broadcast_votes = false; // all-to-all votes, certificates formed locally
  std::string domain = "agree";
  uint32_t timer_base = 0x30;
};

inline AgreementKinds dare_agreement_kinds() {
  return AgreementKinds{MsgKind::AgreeStatus,      MsgKind::AgreePropose,
                        MsgKind::AgreePrepareVote, MsgKind::AgreePrepareQc,
                        MsgKind::AgreeCommitVote,  MsgKind::AgreeCommitQc,
                        MsgKind::EpochCompleted,   MsgKind::EnterEpoch,
                        false,                     "agree",
                        0x30};
}

inline AgreementKinds baseline_kinds() {
  // The baseline never sends certificate messages: votes go all-to-all and
  // every process combines its own.
  return AgreementKinds{MsgKind::BaselineStatus,      MsgKind::BaselinePropose,
                        MsgKind::BaselinePrepareVote, MsgKind::BaselinePropose /*unused*/,
                        MsgKind::BaselineCommitVote,  MsgKind::BaselinePropose /*unused*/,
                        MsgKind::EpochCompleted,      MsgKind::EnterEpoch,
                        true,                         "base",
                        0x30};
}

/// Two-phase, view-based, leader-driven validated consensus with quorum
/// certificates and locking; views are grouped into epochs of t+1 views with
/// a synchronizer that talks only at epoch boundaries.
///
///  - Agreement: commit quorum in view v leaves >= n-2t correct processes
///    locked on (payload, v); a later prepare certificate needs one of their
///    votes, which requires a justify certificate at view >= v — inductively
///    only the committed payload can gather one.
///  - External validity: voters check the payload before voting.
///  - Termination: within an epoch entered after GST, the first view led by
///    a correct process decides; deciders forward the commit certificate
///    once and halt.
class AgreementEngine {
 public:
  // A status+two-phase round is six one-way hops; entry skew within an epoch
  // is <= 2*delta. Tunable.
  static constexpr Tick kViewDurationDeltas = 8;

  AgreementEngine(const ProtocolParams& p, AgreementKinds kinds,
                  std::function<void(Context&, const AgrPayload&)> on_decide)
      : params_(p), kinds_(kinds), on_decide_(std::move(on_decide)) {
    SyncConfig cfg;
    cfg.completed_kind = kinds_.epoch_completed;
    cfg.enter_kind = kinds_.enter_epoch;
    cfg.domain = kinds_.domain + "-epoch";
    cfg.timer_base = kinds_.timer_base;
    const ProtocolParams params = params_;
    cfg.duration = [params](int entered) {
      return (params.t + 1) * kViewDurationDeltas * eff_delta(params, entered);
    };
    cfg.dissemination = [params](int entered) { return eff_delta(params, entered); };
    epochs_ = std::make_unique<SyncEngine>(
        std::move(cfg), [this](Context& ctx, View e) { on_epoch(ctx, e); });
  }

  void propose(Context& ctx, AgrPayload payload) {
    if (proposal_) throw std::logic_error("agreement propose invoked twice");
    proposal_ = std::move(payload);
    if (halted_) return;
    if (!started_) {
      started_ = true;
      epochs_->start(ctx);
    } else {
      maybe_propose(ctx, cur_view_);
    }
  }

  bool handle_message(Context& ctx, const Message& m) {
    if (epochs_->handle_message(ctx, m)) return true;
    if (m.kind == kinds_.status) {
      if (!halted_) on_status(ctx, m);
    } else if (m.kind == kinds_.propose) {
      if (!halted_) on_propose(ctx, m);
    } else if (m.kind == kinds_.prepare_vote) {
      if (!halted_) on_vote(ctx, m, Phase::Prepare);
    } else if (m.kind == kinds_.commit_vote) {
      if (!halted_) on_vote(ctx, m, Phase::Commit);
    } else if (!kinds_.broadcast_votes && m.kind == kinds_.prepare_qc) {
      if (!halted_) on_certificate(ctx, m.view, extract_payload(m), m.aux_qc, Phase::Prepare);
    } else if (!kinds_.broadcast_votes && m.kind == kinds_.commit_qc) {
      on_certificate(ctx, m.view, extract_payload(m), m.aux_qc, Phase::Commit);
    } else {
      return false;
    }
    return true;
  }

  bool handle_timer(Context& ctx, uint32_t id) {
    if (epochs_->handle_timer(ctx, id)) return true;
    if (id != step_timer()) return false;
    if (halted_) return true;
    // step to the next view of the current epoch; the epoch synchronizer's
    // own timer takes over at the boundary
    if (view_in_epoch_ + 1 < params_.t + 1) {
      ++view_in_epoch_;
      enter_view(ctx, first_view(cur_epoch_) + view_in_epoch_);
      if (view_in_epoch_ + 1 < params_.t + 1)
        ctx.arm_timer(step_timer(), view_duration());
    }
    return true;
  }

  bool decided() const { return decided_; }
  const std::optional<AgrPayload>& decision() const { return decision_; }

 private:
  enum class Phase { Prepare, Commit };

  uint32_t step_timer() const { return kinds_.timer_base + 2; }
  View first_view(View epoch) const { return (epoch - 1) * (params_.t + 1) + 1; }
  Tick view_duration() const {
    return kViewDurationDeltas * eff_delta(params_, epochs_->entered_count());
  }

  HashVal digest(Context& ctx, const AgrPayload& p) const {
    if (p.is_value)
      return ctx.crypto().hash("v:" + std::to_string(ctx.crypto().hash_value(*p.value).id));
    return ctx.crypto().hash("p:" + std::to_string(p.h.id) + ":" + std::to_string(p.sig));
  }

  std::string vote_msg(Phase ph, View v, HashVal digest_tok) const {
    return kinds_.domain + (ph == Phase::Prepare ? "|prep|" : "|com|") + std::to_string(v) + "|" +
           std::to_string(digest_tok.id);
  }

  bool payload_valid(Context& ctx, const AgrPayload& p) const {
    if (p.is_value) return p.value && ctx.valid(*p.value);
    return ctx.crypto().verify_threshold(sig_msg_hash(p.h), p.sig);
  }

  void embed_payload(Message& m, const AgrPayload& p) const {
    if (p.is_value) {
      m.value = p.value;
    } else {
      m.hash = p.h;
      m.tsig = p.sig;
    }
  }

  AgrPayload extract_payload(const Message& m) const {
    AgrPayload p;
    p.is_value = kinds_.broadcast_votes; // the payload shape is fixed per instance
    if (p.is_value) {
      p.value = m.value;
    } else {
      p.h = m.hash;
      p.sig = m.tsig;
    }
    return p;
  }

  void on_epoch(Context& ctx, View epoch) {
    cur_epoch_ = epoch;
    view_in_epoch_ = 0;
    ctx.cancel_timer(step_timer());
    enter_view(ctx, first_view(epoch));
    if (params_.t + 1 > 1) ctx.arm_timer(step_timer(), view_duration());
  }

  void enter_view(Context& ctx, View v) {
    cur_view_ = v;
    Message st;
    st.kind = kinds_.status;
    st.view = v;
    st.aux_view = locked_view_;
    if (locked_view_ > 0) {
      embed_payload(st, locked_payload_);
      if (locked_payload_.is_value) {
        st.aux_hash = HashVal{};
      } else {
        st.aux_hash = locked_payload_.h;
        st.aux_sig = locked_payload_.sig;
        st.hash = HashVal{};
        st.tsig = 0;
      }
      st.aux_qc = locked_qc_;
    }
    st.bits = bit_size(st.kind, params_);
    ctx.send(agr_leader(v, params_.n), st);
    if (auto it = proposals_.find(v); it != proposals_.end()) try_vote(ctx, v);
    if (locked_view_ == v && voted_commit_ < v) {
      voted_commit_ = v;
      send_vote(ctx, kinds_.commit_vote, Phase::Commit, v, digest(ctx, locked_payload_));
    }
    maybe_propose(ctx, v);
  }

  void on_status(Context& ctx, const Message& m) {
    StatusRec rec;
    rec.locked_view = m.aux_view;
    if (m.aux_view > 0) {
      AgrPayload p;
      p.is_value = kinds_.broadcast_votes;
      p.h = m.aux_hash;
      p.sig = m.aux_sig;
      p.value = m.value;
      // a claimed lock must carry a verifying prepare certificate
      if ((p.is_value && !p.value) ||
          !ctx.crypto().verify_threshold(vote_msg(Phase::Prepare, m.aux_view, digest(ctx, p)),
                                         m.aux_qc)) {
        rec.locked_view = 0;
      } else {
        rec.payload = p;
        rec.qc = m.aux_qc;
      }
    }
    statuses_[m.view][m.sender] = std::move(rec);
    maybe_propose(ctx, m.view);
  }

  void maybe_propose(Context& ctx, View v) {
    if (halted_ || cur_view_ != v || agr_leader(v, params_.n) != ctx.me()) return;
    if (proposed_.count(v)) return;
    auto it = statuses_.find(v);
    if (it == statuses_.end() || static_cast<int>(it->second.size()) < params_.quorum()) return;
    const StatusRec* best = nullptr;
    for (auto& [pid, rec] : it->second)
      if (rec.locked_view > 0 && (!best || rec.locked_view > best->locked_view)) best = &rec;
    Message prop;
    prop.kind = kinds_.propose;
    prop.view = v;
    if (best) {
      embed_payload(prop, best->payload);
      prop.aux_view = best->locked_view;
      prop.aux_qc = best->qc;
    } else if (proposal_) {
      embed_payload(prop, *proposal_);
    } else {
      return; // nothing to propose yet; retried when propose() fires
    }
    proposed_.insert(v);
    prop.bits = bit_size(prop.kind, params_);
    ctx.broadcast(prop);
  }

  void on_propose(Context& ctx, const Message& m) {
    if (m.sender != agr_leader(m.view, params_.n)) return;
    if (proposals_.count(m.view)) return; // first proposal per view wins
    Proposal prop;
    prop.payload = extract_payload(m);
    if (!payload_valid(ctx, prop.payload)) return;
    prop.justify_view = m.aux_view;
    prop.justify_qc = m.aux_qc;
    proposals_.emplace(m.view, std::move(prop));
    try_vote(ctx, m.view);
    check_quorum(ctx, m.view, Phase::Prepare);
    check_quorum(ctx, m.view, Phase::Commit);
  }

  void try_vote(Context& ctx, View v) {
    if (halted_ || cur_view_ != v || voted_prepare_ >= v) return;
    auto it = proposals_.find(v);
    if (it == proposals_.end()) return;
    const Proposal& prop = it->second;
    HashVal d = digest(ctx, prop.payload);
    if (locked_view_ > 0 && d != digest(ctx, locked_payload_)) {
      // the proposal must carry a certificate at least as recent as our lock
      bool ok = prop.justify_view >= locked_view_ &&
                ctx.crypto().verify_threshold(
                    vote_msg(Phase::Prepare, prop.justify_view, d), prop.justify_qc);
      if (!ok) return;
    }
    voted_prepare_ = v;
    send_vote(ctx, kinds_.prepare_vote, Phase::Prepare, v, d);
  }

  void send_vote(Context& ctx, MsgKind kind, Phase ph, View v, HashVal d) {
    Message vote;
    vote.kind = kind;
    vote.view = v;
    vote.hash = d;
    vote.psig = ctx.crypto().share_sign(ctx.me(), vote_msg(ph, v, d));
    vote.bits = bit_size(vote.kind, params_);
    if (kinds_.broadcast_votes)
      ctx.broadcast(vote);
    else
      ctx.send(agr_leader(v, params_.n), vote);
  }

  void on_vote(Context& ctx, const Message& m, Phase ph) {
    if (!ctx.crypto().verify_partial(m.psig, m.sender, vote_msg(ph, m.view, m.hash))) return;
    auto& tally = (ph == Phase::Prepare ? prepare_votes_ : commit_votes_);
    tally[m.view][m.hash][m.sender] = m.psig;
    check_quorum(ctx, m.view, ph);
  }

  void check_quorum(Context& ctx, View v, Phase ph) {
    auto& tally = (ph == Phase::Prepare ? prepare_votes_ : commit_votes_);
    auto& formed = (ph == Phase::Prepare ? prepare_formed_ : commit_formed_);
    auto pit = proposals_.find(v);
    if (pit == proposals_.end() || formed.count(v)) return;
    HashVal d = digest(ctx, pit->second.payload);
    auto vit = tally.find(v);
    if (vit == tally.end()) return;
    auto dit = vit->second.find(d);
    if (dit == vit->second.end() || static_cast<int>(dit->second.size()) < params_.quorum())
      return;
    if (!kinds_.broadcast_votes && agr_leader(v, params_.n) != ctx.me()) return;
    formed.insert(v);
    std::vector<SigTok> parts;
    for (auto& [pid, tok] : dit->second) parts.push_back(tok);
    SigTok qc = ctx.crypto().combine(parts);
    if (!kinds_.broadcast_votes) {
      Message out;
      out.kind = (ph == Phase::Prepare ? kinds_.prepare_qc : kinds_.commit_qc);
      out.view = v;
      embed_payload(out, pit->second.payload);
      out.aux_qc = qc;
      out.bits = bit_size(out.kind, params_);
      ctx.broadcast(out); // self-delivery feeds on_certificate
    } else {
      on_certificate(ctx, v, pit->second.payload, qc, ph);
    }
  }

  void on_certificate(Context& ctx, View v, AgrPayload payload, SigTok qc, Phase ph) {
    HashVal d = digest(ctx, payload);
    if (!ctx.crypto().verify_threshold(vote_msg(ph, v, d), qc)) return;
    if (ph == Phase::Prepare) {
      if (halted_) return;
      if (v > locked_view_) {
        locked_view_ = v;
        locked_payload_ = payload;
        locked_qc_ = qc;
      }
      if (cur_view_ == v && voted_commit_ < v) {
        voted_commit_ = v;
        send_vote(ctx, kinds_.commit_vote, Phase::Commit, v, d);
      }
    } else {
      if (decided_) return;
      decided_ = true;
      decision_ = payload;
      if (!kinds_.broadcast_votes) {
        // help laggards, then halt
        Message fwd;
        fwd.kind = kinds_.commit_qc;
        fwd.view = v;
        embed_payload(fwd, payload);
        fwd.aux_qc = qc;
        fwd.bits = bit_size(fwd.kind, params_);
        ctx.broadcast(fwd);
      }
      halt(ctx);
      on_decide_(ctx, *decision_);
    }
  }

  void halt(Context& ctx) {
    halted_ = true;
    ctx.cancel_timer(step_timer());
    epochs_->stop(ctx);
  }

  struct StatusRec {
    View locked_view = 0;
    AgrPayload payload;
    SigTok qc = 0;
  };
  struct Proposal {
    AgrPayload payload;
    View justify_view = 0;
    SigTok justify_qc = 0;
  };

  ProtocolParams params_;
  AgreementKinds kinds_;
  std::function<void(Context&, const AgrPayload&)> on_decide_;
  std::unique_ptr<SyncEngine> epochs_;
  std::optional<AgrPayload> proposal_;
  bool started_ = false;
  bool halted_ = false;
  bool decided_ = false;
  std::optional<AgrPayload> decision_;
  View cur_epoch_ = 0;
  int view_in_epoch_ = 0;
  View cur_view_ = 0;
  View locked_view_ = 0;
  AgrPayload locked_payload_;
  SigTok locked_qc_ = 0;
  View voted_prepare_ = 0;
  View voted_commit_ = 0;
  std::set<View> proposed_;
  std::map<View, std::map<Pid, StatusRec>> statuses_;
  std::map<View, Proposal> proposals_;
  std::map<View, std::map<HashVal, std::map<Pid, SigTok>>> prepare_votes_;
  std::map<View, std::map<HashVal, std::map<Pid, SigTok>>> commit_votes_;
  std::set<View> prepare_formed_;
  std::set<View> commit_formed_;
};

} // namespace darelab
