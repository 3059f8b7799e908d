#pragma once

#include "darelab/dare.hpp"

namespace darelab {

/// Trivial reduction of vector consensus to validated consensus: agree, via
/// an inner DARE instance, on a vector of n-t correctly signed proposals.
struct SignedProposal {
  Pid proposer = 0;
  std::vector<uint8_t> proposal;
  SigTok signature = 0;
};

inline std::string vc_proposal_msg(const std::vector<uint8_t>& bytes) {
  return "vcp|" + std::string(bytes.begin(), bytes.end());
}

inline std::vector<uint8_t> serialize_vector(std::vector<SignedProposal> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const SignedProposal& a, const SignedProposal& b) { return a.proposer < b.proposer; });
  std::vector<uint8_t> out;
  auto put16 = [&](uint16_t v) {
    out.push_back(v & 0xFF);
    out.push_back(v >> 8);
  };
  auto put64 = [&](uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back((v >> (8 * i)) & 0xFF);
  };
  put16(static_cast<uint16_t>(entries.size()));
  for (const SignedProposal& e : entries) {
    put16(static_cast<uint16_t>(e.proposer));
    put64(e.signature);
    put64(e.proposal.size());
    out.insert(out.end(), e.proposal.begin(), e.proposal.end());
  }
  return out;
}

inline std::optional<std::vector<SignedProposal>> parse_vector(const std::vector<uint8_t>& bytes) {
  size_t at = 0;
  auto get16 = [&]() -> std::optional<uint16_t> {
    if (at + 2 > bytes.size()) return std::nullopt;
    uint16_t v = bytes[at] | (bytes[at + 1] << 8);
    at += 2;
    return v;
  };
  auto get64 = [&]() -> std::optional<uint64_t> {
    if (at + 8 > bytes.size()) return std::nullopt;
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(bytes[at + i]) << (8 * i);
    at += 8;
    return v;
  };
  auto count = get16();
  if (!count) return std::nullopt;
  std::vector<SignedProposal> out;
  for (uint16_t i = 0; i < *count; ++i) {
    SignedProposal e;
    auto pid = get16();
    auto sig = get64();
    auto len = get64();
    if (!pid || !sig || !len || at + *len > bytes.size()) return std::nullopt;
    e.proposer = *pid;
    e.signature = *sig;
    e.proposal.assign(bytes.begin() + at, bytes.begin() + at + *len);
    at += *len;
    out.push_back(std::move(e));
  }
  if (at != bytes.size()) return std::nullopt;
  return out;
}

/// External validity of the inner DARE instance: exactly n-t entries from
/// distinct proposers, every signature verifying.
inline bool vector_valid(const CryptoRegistry& crypto, const ProtocolParams& p, const Value& v) {
  auto entries = parse_vector(v.bytes);
  if (!entries || static_cast<int>(entries->size()) != p.quorum()) return false;
  Pid prev = 0;
  for (const SignedProposal& e : *entries) {
    if (e.proposer <= prev || e.proposer > p.n) return false;
    prev = e.proposer;
    if (!crypto.verify_single(e.signature, e.proposer, vc_proposal_msg(e.proposal))) return false;
  }
  return true;
}

inline ProtocolParams vector_inner_params(const ProtocolParams& outer) {
  ProtocolParams inner = outer;
  inner.value_bits = static_cast<uint64_t>(outer.quorum()) * (outer.kappa + outer.proposal_bits);
  return inner;
}

struct VectorOptions {
  bool silent = false;
};

class VectorProcess : public IProtocol {
 public:
  using Options = VectorOptions;

  VectorProcess(const ProtocolParams& p, std::vector<uint8_t> proposal, Options opt = {})
      : params_(p),
        proposal_(std::move(proposal)),
        opt_(opt),
        inner_(vector_inner_params(p),
               [](Context& ctx, ValuePtr v) { ctx.note_decide(std::move(v)); }) {}

  void on_start(Context& ctx) override {
    if (opt_.silent) return;
    Message m;
    m.kind = MsgKind::VcProposal;
    m.value = std::make_shared<Value>(Value{proposal_, params_.proposal_bits});
    m.psig = ctx.crypto().sign_single(ctx.me(), vc_proposal_msg(proposal_));
    m.bits = bit_size(m.kind, params_);
    ctx.broadcast(m);
  }

  void on_message(Context& ctx, const Message& m) override {
    if (opt_.silent) return;
    if (m.kind != MsgKind::VcProposal) {
      inner_.handle_message(ctx, m);
      return;
    }
    if (!m.value || collected_.count(m.sender)) return;
    if (!ctx.crypto().verify_single(m.psig, m.sender, vc_proposal_msg(m.value->bytes))) return;
    collected_.emplace(m.sender, SignedProposal{m.sender, m.value->bytes, m.psig});
    arrival_.push_back(m.sender);
    if (inner_started_ || static_cast<int>(collected_.size()) < params_.quorum()) return;
    inner_started_ = true;
    std::vector<SignedProposal> entries;
    for (Pid p : arrival_) entries.push_back(collected_.at(p));
    auto vec = std::make_shared<Value>();
    vec->bytes = serialize_vector(std::move(entries));
    vec->nominal_bits = vector_inner_params(params_).value_bits;
    inner_.propose(ctx, std::move(vec));
  }

  void on_timer(Context& ctx, uint32_t id) override {
    if (!opt_.silent) inner_.handle_timer(ctx, id);
  }

 private:
  ProtocolParams params_;
  std::vector<uint8_t> proposal_;
  Options opt_;
  DareCore inner_;
  std::map<Pid, SignedProposal> collected_;
  std::vector<Pid> arrival_;
  bool inner_started_ = false;
};

} // namespace darelab
