#ifndef SECTRAIN_LINPROT_WIRE_H_
#define SECTRAIN_LINPROT_WIRE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "sectrain/common/bytes.h"
#include "sectrain/he/ciphertext.h"
#include "sectrain/he/scheme.h"
#include "sectrain/ring/ring.h"

namespace sectrain::linprot::wire {

enum class Op : uint8_t {
  kKeys = 1,
  kLinearB = 2,
  kOffline = 3,
  kOnline = 4,
  kRelu = 5,
  kReluBackward = 6,
  kMaxPool = 7,
  kMaxPoolBackward = 8,
  kFinish = 9,
  kSync = 10,
};

inline constexpr uint32_t kNoHandle = 0xffffffffu;

// Noise estimate (f64 bits) followed by the ciphertext.
void PutCipher(ByteWriter& out, const he::Ciphertext& c);
he::Ciphertext GetCipher(ByteReader& in, const he::Scheme& scheme);

// Coefficients bit-packed at the width of the plaintext modulus.
void PutPlain(ByteWriter& out, const ring::RingElem& p);
ring::RingElem GetPlain(ByteReader& in, const ring::RingParams& plain);

// Count (u32) and `bits`-bit packed values.
void PutShares(ByteWriter& out, std::span<const uint64_t> v, int bits);
std::vector<uint64_t> GetShares(ByteReader& in, int bits);

}  // namespace sectrain::linprot::wire

#endif  // SECTRAIN_LINPROT_WIRE_H_
