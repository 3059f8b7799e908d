#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "darelab/model.hpp"

namespace darelab {

struct CryptoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientQuorum : CryptoError {
  InsufficientQuorum() : CryptoError("combine: fewer than n-t distinct signers") {}
};
struct MixedMessages : CryptoError {
  MixedMessages() : CryptoError("combine: partial signatures cover different messages") {}
};
struct ForgeryAttempt : CryptoError {
  using CryptoError::CryptoError;
};

/// Simulation-grade hash + (n-t, n)-threshold signatures.
///
/// The registry is the per-run oracle: hashing interns byte strings (so equal
/// digests imply equal preimages within a run), and every legitimately
/// produced signature is recorded so verification is exact and unforgeable —
/// a token an adversary makes up never verifies. Each object is charged
/// kappa bits by the message size model; real crypto is replaceable behind
/// this interface.
class CryptoRegistry {
 public:
  explicit CryptoRegistry(int n) : n_(n) {}

  HashVal hash(std::string_view bytes) {
    auto it = intern_.find(std::string(bytes));
    if (it != intern_.end()) return HashVal{it->second};
    uint64_t id = next_hash_++;
    intern_.emplace(std::string(bytes), id);
    return HashVal{id};
  }

  HashVal hash_value(const Value& v) {
    return hash(std::string_view(reinterpret_cast<const char*>(v.bytes.data()), v.bytes.size()));
  }

  /// Partial signature by `signer` over `msg`. The simulator only hands each
  /// process its own identity, so a process (correct or Byzantine) can only
  /// sign as itself.
  SigTok share_sign(Pid signer, std::string_view msg) {
    if (signer < 1 || signer > n_) throw ForgeryAttempt("share_sign: bad signer identity");
    SigTok tok = next_sig_++;
    partials_.emplace(tok, PartialRec{signer, std::string(msg)});
    return tok;
  }

  bool verify_partial(SigTok tok, Pid signer, std::string_view msg) const {
    auto it = partials_.find(tok);
    return it != partials_.end() && it->second.signer == signer && it->second.msg == msg;
  }

  /// Combines >= n-t distinct valid partials on one message into a threshold
  /// signature. Throws InsufficientQuorum / MixedMessages otherwise.
  SigTok combine(std::span<const SigTok> partials) {
    std::set<Pid> signers;
    const std::string* msg = nullptr;
    for (SigTok tok : partials) {
      auto it = partials_.find(tok);
      if (it == partials_.end()) continue; // fabricated partials never count
      if (msg && it->second.msg != *msg) throw MixedMessages{};
      msg = &it->second.msg;
      signers.insert(it->second.signer);
    }
    if (!msg || static_cast<int>(signers.size()) < quorum()) throw InsufficientQuorum{};
    SigTok tok = next_sig_++;
    thresholds_.emplace(tok, *msg);
    return tok;
  }

  bool verify_threshold(std::string_view msg, SigTok tok) const {
    auto it = thresholds_.find(tok);
    return it != thresholds_.end() && it->second == msg;
  }

  // Ordinary per-process signature (a 1-of-1 scheme), used by the vector
  // reduction's signed proposals.
  SigTok sign_single(Pid signer, std::string_view msg) {
    if (signer < 1 || signer > n_) throw ForgeryAttempt("sign_single: bad signer identity");
    SigTok tok = next_sig_++;
    singles_.emplace(tok, PartialRec{signer, std::string(msg)});
    return tok;
  }

  bool verify_single(SigTok tok, Pid signer, std::string_view msg) const {
    auto it = singles_.find(tok);
    return it != singles_.end() && it->second.signer == signer && it->second.msg == msg;
  }

  int quorum() const { return n_ - max_faults_for(n_); }

 private:
  struct PartialRec {
    Pid signer;
    std::string msg;
  };

  int n_;
  uint64_t next_hash_ = 1;
  uint64_t next_sig_ = 1;
  std::map<std::string, uint64_t> intern_;
  std::map<SigTok, PartialRec> partials_;
  std::map<SigTok, std::string> thresholds_;
  std::map<SigTok, PartialRec> singles_;
};

/// Simulation-trusted succinct-proof oracle: prove() records a (index, hash,
/// symbol) tuple derived from a real witness, verify() consults the record.
/// Each proof is charged proof_kappa bits by the size model. The interface is
/// swappable for a real prover.
class ProofOracle {
 public:
  ProofTok prove(int index, HashVal h, const Symbol& s) {
    ProofTok tok = next_++;
    recs_.emplace(tok, Rec{index, h.id, s.words});
    return tok;
  }

  bool verify(int index, HashVal h, const Symbol& s, ProofTok tok) const {
    auto it = recs_.find(tok);
    return it != recs_.end() && it->second.index == index && it->second.hash_id == h.id &&
           it->second.words == s.words && s.index == index;
  }

 private:
  struct Rec {
    int index;
    uint64_t hash_id;
    std::vector<uint16_t> words;
  };
  ProofTok next_ = 1;
  std::map<ProofTok, Rec> recs_;
};

// Canonical byte strings signed by the protocols.
inline std::string sig_msg_hash(HashVal h) { return "h:" + std::to_string(h.id); }

} // namespace darelab
