#include "darelab/model.hpp"

namespace darelab {

const char* kind_name(MsgKind k) {
  switch (k) {
    case MsgKind::ViewCompleted: return "view-completed";
    case MsgKind::EnterView: return "enter-view";
    case MsgKind::EpochCompleted: return "epoch-completed";
    case MsgKind::EnterEpoch: return "enter-epoch";
    case MsgKind::Dispersal: return "dispersal";
    case MsgKind::Ack: return "ack";
    case MsgKind::Confirm: return "confirm";
    case MsgKind::AgreeStatus: return "agree-status";
    case MsgKind::AgreePropose: return "agree-propose";
    case MsgKind::AgreePrepareVote: return "agree-prepare-vote";
    case MsgKind::AgreePrepareQc: return "agree-prepare-qc";
    case MsgKind::AgreeCommitVote: return "agree-commit-vote";
    case MsgKind::AgreeCommitQc: return "agree-commit-qc";
    case MsgKind::BaselineStatus: return "baseline-status";
    case MsgKind::BaselinePropose: return "baseline-propose";
    case MsgKind::BaselinePrepareVote: return "baseline-prepare-vote";
    case MsgKind::BaselineCommitVote: return "baseline-commit-vote";
    case MsgKind::SymbolShare: return "symbol-share";
    case MsgKind::SymbolBcast: return "symbol-bcast";
    case MsgKind::StarkDispersal: return "stark-dispersal";
    case MsgKind::StarkAck: return "stark-ack";
    case MsgKind::StarkRetrieve: return "stark-retrieve";
    case MsgKind::VcProposal: return "proposal";
  }
  return "?";
}

ModuleId module_of(MsgKind k) {
  switch (k) {
    case MsgKind::ViewCompleted:
    case MsgKind::EnterView: return ModuleId::Sync;
    case MsgKind::Dispersal:
    case MsgKind::Ack:
    case MsgKind::Confirm: return ModuleId::Disperser;
    case MsgKind::EpochCompleted:
    case MsgKind::EnterEpoch:
    case MsgKind::AgreeStatus:
    case MsgKind::AgreePropose:
    case MsgKind::AgreePrepareVote:
    case MsgKind::AgreePrepareQc:
    case MsgKind::AgreeCommitVote:
    case MsgKind::AgreeCommitQc: return ModuleId::Agreement;
    case MsgKind::BaselineStatus:
    case MsgKind::BaselinePropose:
    case MsgKind::BaselinePrepareVote:
    case MsgKind::BaselineCommitVote: return ModuleId::Baseline;
    case MsgKind::SymbolShare:
    case MsgKind::SymbolBcast: return ModuleId::Retriever;
    case MsgKind::StarkDispersal:
    case MsgKind::StarkAck:
    case MsgKind::StarkRetrieve: return ModuleId::Stark;
    case MsgKind::VcProposal: return ModuleId::Vector;
  }
  return ModuleId::Vector;
}

uint64_t bit_size(MsgKind kind, const ProtocolParams& p) {
  const uint64_t h = kHeaderBits;
  const uint64_t k = p.kappa;
  switch (kind) {
    case MsgKind::Dispersal: return p.value_bits + h;
    case MsgKind::Ack:
    case MsgKind::ViewCompleted:
    case MsgKind::EpochCompleted:
    case MsgKind::StarkAck:
    case MsgKind::AgreePrepareVote:
    case MsgKind::AgreeCommitVote:
    case MsgKind::BaselinePrepareVote:
    case MsgKind::BaselineCommitVote: return k + h;
    case MsgKind::Confirm:
    case MsgKind::EnterView:
    case MsgKind::EnterEpoch: return 2 * k + h;
    case MsgKind::SymbolShare:
    case MsgKind::SymbolBcast: return p.symbol_bits() + k + h;
    case MsgKind::StarkDispersal:
    case MsgKind::StarkRetrieve: return p.symbol_bits() + k + p.proof_kappa + h;
    case MsgKind::AgreeStatus:
    case MsgKind::AgreePropose: return 4 * k + h;
    case MsgKind::AgreePrepareQc:
    case MsgKind::AgreeCommitQc: return 3 * k + h;
    case MsgKind::BaselineStatus:
    case MsgKind::BaselinePropose: return p.value_bits + 3 * k + h;
    case MsgKind::VcProposal: return p.proposal_bits + k + h;
  }
  throw std::logic_error("bit_size: malformed message kind");
}

} // namespace darelab
