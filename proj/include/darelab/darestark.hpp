#pragma once

#include "darelab/agreement.hpp"
#include "darelab/erasure.hpp"

namespace darelab {

/// shard_i(v) = (hash(v), encode_i(v)) iff valid(v), bottom otherwise.
inline std::optional<std::pair<HashVal, Symbol>> shard(Context& ctx, int index, const Value& v) {
  if (!ctx.valid(v)) return std::nullopt;
  std::vector<Symbol> symbols = encode(v, ctx.params());
  return std::make_pair(ctx.crypto().hash_value(v), symbols[index - 1]);
}

/// Shard-based dispersal and retrieval with succinct proofs of correct
/// encoding. No view synchronizer: every process shards immediately on
/// propose; agreement on (hash, threshold signature) supplies liveness.
/// No correct process ever sends a message larger than
/// ceil(L/(t+1)) + kappa + proof_kappa + header bits.
///
/// Decisions rest on t+1 proof-verified symbols for one hash: the proofs
/// guarantee every symbol encodes the same valid preimage, so a plain
/// erasure decode suffices and the result hashes to the agreed value.
struct StarkOptions {
  bool silent = false;
  bool equivocate = false;        // disperse shards of two different values
  bool garbage_retrieval = false; // corrupt the symbol in RETRIEVE messages
};

class StarkProcess : public IProtocol {
 public:
  using Options = StarkOptions;

  StarkProcess(const ProtocolParams& p, ValuePtr proposal, Options opt = {})
      : params_(p),
        proposal_(std::move(proposal)),
        opt_(opt),
        agreement_(p, dare_agreement_kinds(),
                   [this](Context& ctx, const AgrPayload& pl) { on_agreed(ctx, pl); }) {}

  void on_start(Context& ctx) override {
    if (opt_.silent) return;
    disperse(ctx, proposal_);
    if (opt_.equivocate) {
      auto twin = std::make_shared<Value>(*proposal_);
      if (twin->bytes.size() > 1) twin->bytes[1] ^= 0xFF;
      disperse(ctx, std::move(twin), /*second_half_only=*/true);
    }
  }

  void on_message(Context& ctx, const Message& m) override {
    if (opt_.silent) return;
    if (agreement_.handle_message(ctx, m)) return;
    switch (m.kind) {
      case MsgKind::StarkDispersal: on_dispersal(ctx, m); break;
      case MsgKind::StarkAck: on_ack(ctx, m); break;
      case MsgKind::StarkRetrieve: on_retrieve(ctx, m); break;
      default: break;
    }
  }

  void on_timer(Context& ctx, uint32_t id) override {
    if (!opt_.silent) agreement_.handle_timer(ctx, id);
  }

  bool decided() const { return decided_; }
  ValuePtr decision() const { return decision_; }

 private:
  void disperse(Context& ctx, ValuePtr v, bool second_half_only = false) {
    HashVal h = ctx.crypto().hash_value(*v);
    if (!second_half_only) proposed_hash_ = h;
    std::vector<Symbol> symbols = encode(*v, params_);
    for (int k = 1; k <= params_.n; ++k) {
      if (second_half_only && k <= params_.n / 2) continue;
      if (opt_.equivocate && !second_half_only && k > params_.n / 2) continue;
      Message m;
      m.kind = MsgKind::StarkDispersal;
      m.hash = h;
      m.symbol = symbols[k - 1];
      m.proof = ctx.proofs().prove(k, h, symbols[k - 1]);
      m.bits = bit_size(m.kind, params_);
      ctx.send(k, m);
    }
  }

  void on_dispersal(Context& ctx, const Message& m) {
    if (!ctx.proofs().verify(ctx.me(), m.hash, m.symbol, m.proof)) return;
    proposal_shards_[m.hash] = {m.symbol, m.proof};
    Message ack;
    ack.kind = MsgKind::StarkAck;
    ack.hash = m.hash;
    ack.psig = ctx.crypto().share_sign(ctx.me(), sig_msg_hash(m.hash));
    ack.bits = bit_size(ack.kind, params_);
    ctx.send(m.sender, ack);
  }

  void on_ack(Context& ctx, const Message& m) {
    if (m.hash != proposed_hash_ || agree_started_) return;
    if (!ctx.crypto().verify_partial(m.psig, m.sender, sig_msg_hash(m.hash))) return;
    acks_[m.sender] = m.psig;
    if (static_cast<int>(acks_.size()) < params_.quorum()) return;
    agree_started_ = true;
    std::vector<SigTok> parts;
    for (auto& [pid, tok] : acks_) parts.push_back(tok);
    AgrPayload pl;
    pl.h = proposed_hash_;
    pl.sig = ctx.crypto().combine(parts);
    agreement_.propose(ctx, pl);
  }

  void on_agreed(Context& ctx, const AgrPayload& pl) {
    auto it = proposal_shards_.find(pl.h);
    if (it == proposal_shards_.end()) return; // no shard held: wait for retrieval
    Message m;
    m.kind = MsgKind::StarkRetrieve;
    m.hash = pl.h;
    m.symbol = it->second.first;
    m.proof = it->second.second;
    if (opt_.garbage_retrieval && !m.symbol.words.empty()) m.symbol.words[0] ^= 0xA5A5;
    m.bits = bit_size(m.kind, params_);
    ctx.broadcast(m);
  }

  void on_retrieve(Context& ctx, const Message& m) {
    if (m.symbol.index != m.sender) return;
    if (!ctx.proofs().verify(m.sender, m.hash, m.symbol, m.proof)) return;
    auto& got = decision_symbols_[m.hash];
    got.emplace(m.sender, m.symbol);
    if (decided_ || static_cast<int>(got.size()) < params_.t + 1) return;
    decided_ = true;
    std::vector<Symbol> symbols;
    for (auto& [pid, s] : got) symbols.push_back(s);
    decision_ = std::make_shared<Value>(decode(symbols, params_));
    ctx.note_decide(decision_);
  }

  ProtocolParams params_;
  ValuePtr proposal_;
  Options opt_;
  AgreementEngine agreement_;
  HashVal proposed_hash_;
  bool agree_started_ = false;
  bool decided_ = false;
  ValuePtr decision_;
  std::map<HashVal, std::pair<Symbol, ProofTok>> proposal_shards_;
  std::map<Pid, SigTok> acks_;
  std::map<HashVal, std::map<Pid, Symbol>> decision_symbols_;
};

} // namespace darelab
