#pragma once

#include <vector>

#include "darelab/model.hpp"

namespace darelab {

struct CodecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ArityError : CodecError {
  ArityError() : CodecError("decode: not enough symbols") {}
};
struct LayoutError : CodecError {
  LayoutError() : CodecError("encode: value not representable in codec layout") {}
};
struct DecodeFailure : CodecError {
  DecodeFailure() : CodecError("decode_correcting: no unique consistent codeword") {}
};

// GF(2^16) arithmetic. Tables are built once at first use.
namespace gf16 {
uint16_t mul(uint16_t a, uint16_t b);
uint16_t inv(uint16_t a);
uint16_t pow(uint16_t a, uint64_t e);
} // namespace gf16

/// Reed-Solomon codec over GF(2^16), evaluation points 1..n, degree t.
///
/// A value is framed as [u32 byte length][bytes][zero pad] and striped across
/// degree-t codewords; "symbol i" concatenates the i-th evaluation of every
/// stripe. Any t+1 symbols reconstruct the value (MDS); decode_correcting
/// additionally tolerates up to t corrupted symbols among >= 2t+1.

std::vector<Symbol> encode(const Value& v, const ProtocolParams& p);

/// Erasure decode from >= t+1 distinct-index uncorrupted symbols.
Value decode(const std::vector<Symbol>& symbols, const ProtocolParams& p);

/// Error-correcting decode: >= 2t+1 symbols, <= t corrupted or fabricated.
/// Returns the unique framing-valid value whose encoding matches >= |S|-t of
/// the supplied symbols; throws DecodeFailure when none (or several) exist.
Value decode_correcting(const std::vector<Symbol>& symbols, const ProtocolParams& p);

/// Full-column match count of `v`'s encoding against the supplied symbols.
int count_matching_symbols(const Value& v, const std::vector<Symbol>& symbols,
                           const ProtocolParams& p);

} // namespace darelab
