#include "wire.h"

#include <bit>

#include "sectrain/common/errors.h"

namespace sectrain::linprot::wire {

void PutCipher(ByteWriter& out, const he::Ciphertext& c) {
  out.PutU64(std::bit_cast<uint64_t>(c.noise_estimate()));
  he::Serialize(c, out);
}

he::Ciphertext GetCipher(ByteReader& in, const he::Scheme& scheme) {
  const double noise = std::bit_cast<double>(in.GetU64());
  if (!(noise >= 0)) throw SerializationError("bad noise estimate");
  return he::DeserializeCiphertext(in, scheme.cipher_ring(), noise, scheme.backend());
}

void PutPlain(ByteWriter& out, const ring::RingElem& p) {
  out.PutPackedBits(p.limb(0), p.params().modulus().bit_count());
}

ring::RingElem GetPlain(ByteReader& in, const ring::RingParams& plain) {
  const auto v = in.GetPackedBits(plain.degree(), plain.modulus().bit_count());
  for (uint64_t c : v) {
    if (c >= plain.modulus().value()) throw SerializationError("plaintext coefficient out of range");
  }
  return ring::RingElem::FromCoeffs(plain, v);
}

void PutShares(ByteWriter& out, std::span<const uint64_t> v, int bits) {
  out.PutU32(static_cast<uint32_t>(v.size()));
  out.PutPackedBits(v, bits);
}

std::vector<uint64_t> GetShares(ByteReader& in, int bits) {
  const uint32_t n = in.GetU32();
  if (PackedBitsSize(n, bits) > in.remaining()) throw SerializationError("share vector truncated");
  return in.GetPackedBits(n, bits);
}

}  // namespace sectrain::linprot::wire
