#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace darelab {

using Tick = int64_t;
using Pid = int;       // process index, 1-based
using View = uint64_t; // views and epochs are unbounded, no wraparound

inline constexpr uint64_t kHeaderBits = 64; // fixed per-message header charge

/// Run-wide protocol parameters. Governs every module.
///
/// Invariants (enforced by validate()):
///  - t = floor((n-1)/3) >= 1; quorum() = n - t (== 2t+1 when n = 3t+1)
///  - 1 <= X, Y <= n; defaults X = Y = ceil(sqrt(n))
///  - kappa > ceil(log2 n); delta > 0; gst >= 0
///  - value_bits >= (t+1) * 16 (one GF(2^16) word per codeword coefficient)
struct ProtocolParams {
  int n = 4;
  int t = 1;
  int X = 2; // leaders per view
  int Y = 2; // dispersal group size
  Tick delta = 10;
  Tick gst = 0;
  uint64_t value_bits = 1024; // L
  uint64_t kappa = 256;       // size of one hash/signature
  uint64_t proof_kappa = 2048; // simulated succinct-proof size
  bool unknown_delta = false;
  Tick delta_guess = 2;        // initial guess in unknown-delta mode
  uint64_t proposal_bits = 0;  // per-process proposal size (vector reduction)

  int quorum() const { return n - t; }
  int groups() const { return (n + Y - 1) / Y; }        // dispersal groups per view
  int leader_blocks() const { return (n + X - 1) / X; } // views per leader rotation
  uint64_t symbol_bits() const { return (value_bits + t) / (t + 1); } // ceil(L/(t+1))

  // Required view overlap and Sync view duration (known-delta values).
  Tick overlap_delta() const { return delta * groups() + 3 * delta; }
  Tick view_duration() const { return overlap_delta() + 2 * delta; }

  void validate() const;
  static ProtocolParams make(int n, uint64_t L, uint64_t kappa, Tick delta);
};

inline bool is_perfect_square(int n) {
  for (int r = 0; r * r <= n; ++r)
    if (r * r == n) return true;
  return false;
}

inline int max_faults_for(int n) { return (n - 1) / 3; }

inline void ProtocolParams::validate() const {
  if (n < 4) throw std::invalid_argument("n must be at least 4");
  if (n % 3 != 1 && !is_perfect_square(n))
    throw std::invalid_argument("n=" + std::to_string(n) + " is not 3t+1");
  if (t != max_faults_for(n) || t < 1) throw std::invalid_argument("t must equal floor((n-1)/3)");
  if (X < 1 || X > n || Y < 1 || Y > n) throw std::invalid_argument("X,Y must lie in [1,n]");
  uint64_t lg = 0;
  while ((1ull << lg) < static_cast<uint64_t>(n)) ++lg;
  if (kappa <= lg) throw std::invalid_argument("kappa must exceed log2(n)");
  if (delta <= 0) throw std::invalid_argument("delta must be positive");
  if (gst < 0) throw std::invalid_argument("gst must be nonnegative");
  if (value_bits < static_cast<uint64_t>(t + 1) * 16)
    throw std::invalid_argument("L too small for the codec word size");
  if (unknown_delta && delta_guess <= 0) throw std::invalid_argument("delta_guess must be positive");
}

inline ProtocolParams ProtocolParams::make(int n, uint64_t L, uint64_t kappa, Tick delta) {
  ProtocolParams p;
  p.n = n;
  p.t = max_faults_for(n);
  int r = 1;
  while (r * r < n) ++r; // ceil(sqrt(n))
  p.X = p.Y = r;
  p.value_bits = L;
  p.kappa = kappa;
  p.delta = delta;
  return p;
}

/// Collision-free hash token (oracle-backed, see crypto.hpp). id 0 is "null".
struct HashVal {
  uint64_t id = 0;
  bool null() const { return id == 0; }
  friend bool operator==(HashVal a, HashVal b) { return a.id == b.id; }
  friend bool operator!=(HashVal a, HashVal b) { return a.id != b.id; }
  friend bool operator<(HashVal a, HashVal b) { return a.id < b.id; }
};

using SigTok = uint64_t;   // signature handle into the registry, 0 = null
using ProofTok = uint64_t; // shard-proof handle, 0 = null

/// An L-bit value. bytes is the simulation content; nominal_bits is the
/// modelled length L used by the bit-size accounting.
struct Value {
  std::vector<uint8_t> bytes;
  uint64_t nominal_bits = 0;
  friend bool operator==(const Value& a, const Value& b) { return a.bytes == b.bytes; }
};
using ValuePtr = std::shared_ptr<const Value>;

/// One Reed-Solomon symbol: the index-th evaluation of every stripe.
struct Symbol {
  int index = 0;
  std::vector<uint16_t> words;
  friend bool operator==(const Symbol& a, const Symbol& b) {
    return a.index == b.index && a.words == b.words;
  }
};

// Enum order is the deterministic same-tick delivery rank.
enum class MsgKind : uint8_t {
  ViewCompleted,
  EnterView,
  EpochCompleted,
  EnterEpoch,
  Dispersal,
  Ack,
  Confirm,
  AgreeStatus,
  AgreePropose,
  AgreePrepareVote,
  AgreePrepareQc,
  AgreeCommitVote,
  AgreeCommitQc,
  BaselineStatus,
  BaselinePropose,
  BaselinePrepareVote,
  BaselineCommitVote,
  SymbolShare,
  SymbolBcast,
  StarkDispersal,
  StarkAck,
  StarkRetrieve,
  VcProposal,
};

enum class ModuleId : uint8_t {
  Sync,
  Disperser,
  Agreement,
  Retriever,
  Stark,
  Baseline,
  Vector,
};

const char* kind_name(MsgKind k);
ModuleId module_of(MsgKind k);

/// Wire message. Field use is kind-specific; bits is the charged size and is
/// filled by the sending module via bit_size().
struct Message {
  MsgKind kind = MsgKind::Dispersal;
  Pid sender = 0;
  Pid receiver = 0;
  View view = 0;    // view / epoch number
  HashVal hash;     // subject hash (ack/confirm/stark/agreement pair)
  SigTok psig = 0;  // partial signature
  SigTok tsig = 0;  // threshold signature (confirm, enter-view, pair sigma, QCs)
  ValuePtr value;   // full-value payloads (dispersal, baseline, vc proposal)
  Symbol symbol;    // RS symbol payloads
  ProofTok proof = 0;
  // agreement status / propose extras
  View aux_view = 0;  // locked / justify view
  HashVal aux_hash;   // locked pair hash
  SigTok aux_sig = 0; // locked pair sigma
  SigTok aux_qc = 0;  // locked / justify prepare-QC
  uint64_t bits = 0;
};

/// Modelled wire size in bits; a pure function of (kind, params).
uint64_t bit_size(MsgKind kind, const ProtocolParams& p);

inline uint64_t bit_size(const Message& m, const ProtocolParams& p) { return bit_size(m.kind, p); }

} // namespace darelab
