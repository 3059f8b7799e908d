#pragma once

#include "darelab/agreement.hpp"
#include "darelab/disperser.hpp"
#include "darelab/retriever.hpp"

namespace darelab {

/// Sequential composition Dispersal -> Agreement -> Retrieval.
///
/// propose(v) disperses v; the acquired (hash, signature) pair is proposed to
/// agreement; on deciding (h, Sigma) the obtained value with hash h (or
/// bottom) is fed to the retriever, whose output is the decision. The
/// retriever preconditions hold at composition time: the collision-free hash
/// gives a unique non-bottom input, and dispersal redundancy gives >= t+1
/// non-bottom inputters.
struct DareOptions {
  bool equivocate_dispersal = false;
  bool garbage_retrieval = false;
};

class DareCore {
 public:
  using Options = DareOptions;

  DareCore(const ProtocolParams& p, std::function<void(Context&, ValuePtr)> on_decide,
           Options opt = {})
      : params_(p),
        on_decide_(std::move(on_decide)),
        disperser_(p, [this](Context& ctx, HashVal h, SigTok s) { on_acquire(ctx, h, s); },
                   Disperser::Options{opt.equivocate_dispersal}),
        agreement_(p, dare_agreement_kinds(),
                   [this](Context& ctx, const AgrPayload& pl) { on_agreed(ctx, pl); }),
        retriever_(p, [this](Context& ctx, ValuePtr v) { on_retrieved(ctx, std::move(v)); },
                   Retriever::Options{opt.garbage_retrieval}) {}

  void propose(Context& ctx, ValuePtr v) { disperser_.disperse(ctx, std::move(v)); }

  bool handle_message(Context& ctx, const Message& m) {
    return disperser_.handle_message(ctx, m) || agreement_.handle_message(ctx, m) ||
           retriever_.handle_message(ctx, m);
  }

  bool handle_timer(Context& ctx, uint32_t id) {
    return disperser_.handle_timer(ctx, id) || agreement_.handle_timer(ctx, id);
  }

  const Disperser& disperser() const { return disperser_; }
  bool decided() const { return decided_; }
  ValuePtr decision() const { return decision_; }
  std::optional<AgrPayload> agreed_pair() const { return agreement_.decision(); }

 private:
  void on_acquire(Context& ctx, HashVal h, SigTok sig) {
    AgrPayload pl;
    pl.h = h;
    pl.sig = sig;
    agreement_.propose(ctx, pl);
  }

  void on_agreed(Context& ctx, const AgrPayload& pl) {
    ValuePtr v; // bottom unless the decided hash denotes an obtained value
    if (auto it = disperser_.obtained().find(pl.h); it != disperser_.obtained().end())
      v = it->second;
    retriever_.input(ctx, std::move(v));
  }

  void on_retrieved(Context& ctx, ValuePtr v) {
    if (decided_) return;
    decided_ = true;
    decision_ = std::move(v);
    on_decide_(ctx, decision_);
  }

  ProtocolParams params_;
  std::function<void(Context&, ValuePtr)> on_decide_;
  Disperser disperser_;
  AgreementEngine agreement_;
  Retriever retriever_;
  bool decided_ = false;
  ValuePtr decision_;
};

/// DARE as a simulator process; the proposal is injected at start.
class DareProcess : public IProtocol {
 public:
  DareProcess(const ProtocolParams& p, ValuePtr proposal, DareCore::Options opt = {})
      : proposal_(std::move(proposal)),
        core_(p, [](Context& ctx, ValuePtr v) { ctx.note_decide(std::move(v)); }, opt) {}

  void on_start(Context& ctx) override { core_.propose(ctx, proposal_); }
  void on_message(Context& ctx, const Message& m) override { core_.handle_message(ctx, m); }
  void on_timer(Context& ctx, uint32_t id) override { core_.handle_timer(ctx, id); }

  const DareCore& core() const { return core_; }

 private:
  ValuePtr proposal_;
  DareCore core_;
};

} // namespace darelab
