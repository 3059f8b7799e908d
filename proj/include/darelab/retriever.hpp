#pragma once

#include "darelab/erasure.hpp"
#include "darelab/simnet.hpp"

namespace darelab {

/// Symbol-exchange retrieval: from >= t+1 correct processes holding the same
/// value v (the rest holding bottom), every correct process outputs v.
///
/// Holders encode v and send symbol s_j to each P_j. A process broadcasts its
/// own symbol once it has t+1 identical copies (so at least one correct
/// origin computed it). With >= 2t+1 broadcast symbols it attempts an
/// error-correcting decode and outputs once the rebuilt value's encoding
/// matches >= 2t+1 of the received broadcast symbols — a wrong codeword can
/// match at most 2t, so outputs are sound even mid-arrival.
struct RetrieverOptions {
  bool garbage_symbols = false; // Byzantine knob: send junk symbols instead
};

class Retriever {
 public:
  using Options = RetrieverOptions;

  Retriever(const ProtocolParams& p, std::function<void(Context&, ValuePtr)> on_output,
            Options opt = {})
      : params_(p), on_output_(std::move(on_output)), opt_(opt) {}

  void input(Context& ctx, ValuePtr v) {
    if (started_) throw std::logic_error("retriever input invoked twice");
    started_ = true;
    my_input_ = std::move(v);
    if (!my_input_) return;
    std::vector<Symbol> symbols =
        opt_.garbage_symbols ? garbage_encoding(ctx) : encode(*my_input_, params_);
    for (int j = 1; j <= params_.n; ++j) {
      Message m;
      m.kind = MsgKind::SymbolShare;
      m.symbol = symbols[j - 1];
      m.bits = bit_size(m.kind, params_);
      ctx.send(j, m);
    }
  }

  bool handle_message(Context& ctx, const Message& m) {
    switch (m.kind) {
      case MsgKind::SymbolShare: on_share(ctx, m); return true;
      case MsgKind::SymbolBcast: on_bcast(ctx, m); return true;
      default: return false;
    }
  }

  bool output_done() const { return output_done_; }

 private:
  void on_share(Context& ctx, const Message& m) {
    if (m.symbol.index != ctx.me()) return; // shares carry the receiver's symbol
    auto& senders = share_tally_[m.symbol.words];
    senders.insert(m.sender);
    if (bcast_done_ || static_cast<int>(senders.size()) < params_.t + 1) return;
    bcast_done_ = true;
    Message out;
    out.kind = MsgKind::SymbolBcast;
    out.symbol = m.symbol;
    if (opt_.garbage_symbols)
      for (uint16_t& w : out.symbol.words) w ^= 0x5A5A;
    out.bits = bit_size(out.kind, params_);
    ctx.broadcast(out);
  }

  void on_bcast(Context& ctx, const Message& m) {
    if (m.symbol.index != m.sender) return; // a process may only broadcast its own symbol
    if (!bcast_symbols_.emplace(m.sender, m.symbol).second) return;
    try_decode(ctx);
  }

  void try_decode(Context& ctx) {
    if (output_done_ || static_cast<int>(bcast_symbols_.size()) < 2 * params_.t + 1) return;
    std::vector<Symbol> symbols;
    symbols.reserve(bcast_symbols_.size());
    for (auto& [pid, s] : bcast_symbols_) symbols.push_back(s);
    Value v;
    try {
      v = decode_correcting(symbols, params_);
    } catch (const CodecError&) {
      return; // wait for more symbols
    }
    if (count_matching_symbols(v, symbols, params_) < 2 * params_.t + 1) return;
    output_done_ = true;
    on_output_(ctx, std::make_shared<Value>(std::move(v)));
  }

  std::vector<Symbol> garbage_encoding(Context& ctx) {
    std::vector<Symbol> symbols = encode(*my_input_, params_);
    uint64_t salt = 0x9E3779B97F4A7C15ull * static_cast<uint64_t>(ctx.me());
    for (Symbol& s : symbols)
      for (size_t j = 0; j < s.words.size(); ++j) {
        salt = salt * 6364136223846793005ull + 1442695040888963407ull;
        s.words[j] = static_cast<uint16_t>(salt >> 37);
      }
    return symbols;
  }

  ProtocolParams params_;
  std::function<void(Context&, ValuePtr)> on_output_;
  Options opt_;
  bool started_ = false;
  bool bcast_done_ = false;
  bool output_done_ = false;
  ValuePtr my_input_;
  std::map<std::vector<uint16_t>, std::set<Pid>> share_tally_;
  std::map<Pid, Symbol> bcast_symbols_;
};

} // namespace darelab
