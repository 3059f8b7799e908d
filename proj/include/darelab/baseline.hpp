#pragma once

#include "darelab/agreement.hpp"

namespace darelab {

/// PBFT-shaped strawman for complexity comparison: each view's single leader
/// broadcasts its full L-bit value, votes are all-to-all kappa-bit messages
/// and certificates form locally. Satisfies the same consensus properties;
/// post-GST bits scale as n^2 * L under the adversarial shift.
struct BaselineOptions {
  bool silent = false;
};

class BaselineProcess : public IProtocol {
 public:
  using Options = BaselineOptions;

  BaselineProcess(const ProtocolParams& p, ValuePtr proposal, Options opt = {})
      : proposal_(std::move(proposal)),
        opt_(opt),
        engine_(p, baseline_kinds(), [](Context& ctx, const AgrPayload& pl) {
          ctx.note_decide(pl.value);
        }) {}

  void on_start(Context& ctx) override {
    if (opt_.silent) return;
    AgrPayload pl;
    pl.is_value = true;
    pl.value = proposal_;
    engine_.propose(ctx, pl);
  }

  void on_message(Context& ctx, const Message& m) override {
    if (!opt_.silent) engine_.handle_message(ctx, m);
  }

  void on_timer(Context& ctx, uint32_t id) override {
    if (!opt_.silent) engine_.handle_timer(ctx, id);
  }

 private:
  ValuePtr proposal_;
  Options opt_;
  AgreementEngine engine_;
};

/// A Byzantine process that never sends anything.
class SilentProcess : public IProtocol {
 public:
  void on_start(Context&) override {}
  void on_message(Context&, const Message&) override {}
};

} // namespace darelab
