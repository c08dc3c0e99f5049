#include "sectrain/mpc/share.h"

#include <string>

#include "sectrain/common/errors.h"

namespace sectrain::mpc {

void CheckBits(int bits) {
  if (bits < 1 || bits > 64) throw ParameterError("bitwidth must be in [1, 64]");
}

int64_t ToSigned(uint64_t v, int bits) {
  v &= RingMask(bits);
  if (bits < 64 && (v >> (bits - 1)) != 0) v |= ~RingMask(bits);
  return static_cast<int64_t>(v);
}

uint64_t FromSigned(int64_t v, int bits) { return static_cast<uint64_t>(v) & RingMask(bits); }

std::pair<Share, Share> ShareValue(uint64_t x, int bits, Prng& rng) {
  if (bits < 8 || bits > 64) throw ParameterError("share bitwidth must be in [8, 64]");
  const uint64_t s0 = rng.Bits(bits);
  return {Share{s0, 0, bits}, Share{(x - s0) & RingMask(bits), 1, bits}};
}

uint64_t Reconstruct(const Share& a, const Share& b) {
  if (a.bits != b.bits) {
    throw ParameterError("bitwidth mismatch: " + std::to_string(a.bits) + " vs " +
                         std::to_string(b.bits));
  }
  if (a.party == b.party) throw ParameterError("both shares belong to one party");
  CheckBits(a.bits);
  return (a.value + b.value) & RingMask(a.bits);
}

std::pair<std::vector<uint64_t>, std::vector<uint64_t>> ShareVector(
    std::span<const uint64_t> x, int bits, Prng& rng) {
  CheckBits(bits);
  const uint64_t m = RingMask(bits);
  std::vector<uint64_t> s0(x.size()), s1(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    s0[i] = rng.Bits(bits);
    s1[i] = (x[i] - s0[i]) & m;
  }
  return {std::move(s0), std::move(s1)};
}

std::vector<uint64_t> ReconstructVector(std::span<const uint64_t> s0,
                                        std::span<const uint64_t> s1, int bits) {
  CheckBits(bits);
  if (s0.size() != s1.size()) throw ParameterError("share vectors differ in length");
  std::vector<uint64_t> out(s0.size());
  for (size_t i = 0; i < s0.size(); ++i) out[i] = (s0[i] + s1[i]) & RingMask(bits);
  return out;
}

}  // namespace sectrain::mpc
