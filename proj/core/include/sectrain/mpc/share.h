#ifndef SECTRAIN_MPC_SHARE_H_
#define SECTRAIN_MPC_SHARE_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sectrain/common/prng.h"

namespace sectrain::mpc {

inline uint64_t RingMask(int bits) {
  return bits >= 64 ? ~uint64_t(0) : (uint64_t(1) << bits) - 1;
}

// Throws ParameterError unless 1 <= bits <= 64.
void CheckBits(int bits);

// Two's-complement views of a residue mod 2^bits.
int64_t ToSigned(uint64_t v, int bits);
uint64_t FromSigned(int64_t v, int bits);

// One party's additive share of a value mod 2^bits.
struct Share {
  uint64_t value = 0;
  int party = 0;
  int bits = 32;
};

// Requires 8 <= bits <= 64.
std::pair<Share, Share> ShareValue(uint64_t x, int bits, Prng& rng);
// Throws ParameterError on a bitwidth mismatch or two shares of one party.
uint64_t Reconstruct(const Share& a, const Share& b);

std::pair<std::vector<uint64_t>, std::vector<uint64_t>> ShareVector(
    std::span<const uint64_t> x, int bits, Prng& rng);
std::vector<uint64_t> ReconstructVector(std::span<const uint64_t> s0,
                                        std::span<const uint64_t> s1, int bits);

}  // namespace sectrain::mpc

#endif  // SECTRAIN_MPC_SHARE_H_
