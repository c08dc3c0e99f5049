#ifndef SECTRAIN_HE_PARAMS_H_
#define SECTRAIN_HE_PARAMS_H_

#include <cstdint>
#include <vector>

#include "sectrain/ring/ring.h"

namespace sectrain::he {

// Parameters of the BFV-style scheme. `ring` carries the ciphertext
// modulus q, `plain` the payload modulus t over the same degree.
struct HeParams {
  ring::RingParams ring;
  ring::RingParams plain;
  double noise_stddev = 3.2;
  int relin_decomp_bits = 16;

  // Two 60-bit ciphertext primes and a 37-bit plaintext prime, all
  // NTT-friendly for `degree`.
  static HeParams Default(uint32_t degree = 4096);
  static HeParams Create(uint32_t degree, std::vector<uint64_t> q_moduli,
                         uint64_t plain_modulus, double noise_stddev = 3.2,
                         int relin_decomp_bits = 16);

  uint32_t degree() const { return ring.degree(); }
  uint64_t plain_modulus() const { return plain.modulus().value(); }
  // log2(q).
  double log_q() const;
  // Number of base-2^W digits needed to cover q.
  int relin_digits() const;
};

}  // namespace sectrain::he

#endif  // SECTRAIN_HE_PARAMS_H_
