#include "sectrain/he/params.h"

#include <cmath>
#include <string>

#include "sectrain/common/errors.h"
#include "sectrain/he/noise.h"

namespace sectrain::he {

HeParams HeParams::Default(uint32_t degree) {
  const uint64_t two_n = 2 * uint64_t{degree};
  auto q = ring::FindNttPrimes(60, two_n, 2);
  auto t = ring::FindNttPrimes(37, two_n, 1);
  return Create(degree, std::move(q), t[0]);
}

HeParams HeParams::Create(uint32_t degree, std::vector<uint64_t> q_moduli,
                          uint64_t plain_modulus, double noise_stddev,
                          int relin_decomp_bits) {
  HeParams p;
  p.ring = ring::RingParams::Create(degree, std::move(q_moduli));
  p.plain = ring::RingParams::Create(degree, plain_modulus);
  p.noise_stddev = noise_stddev;
  p.relin_decomp_bits = relin_decomp_bits;
  if (!p.ring.ntt_enabled()) {
    throw ParameterError("ciphertext moduli must be NTT-friendly primes");
  }
  for (uint64_t qi : p.ring.modulus_values()) {
    if (qi == plain_modulus) throw ParameterError("plain modulus equals a ciphertext prime");
  }
  if (plain_modulus < 2) throw ParameterError("plain modulus must be >= 2");
  if (p.log_q() < std::log2(double(plain_modulus)) + 20) {
    throw ParameterError("ciphertext modulus too small for plain modulus " +
                         std::to_string(plain_modulus));
  }
  if (!(noise_stddev > 0) || noise_stddev > 64) {
    throw ParameterError("noise deviation out of range");
  }
  if (relin_decomp_bits < 1 || relin_decomp_bits > 32) {
    throw ParameterError("relinearization base must be 2^1..2^32");
  }
  NoiseModel noise(p);
  const double fresh = noise.Fresh();
  const double product = noise.AfterRelin(noise.AfterTensor(fresh, fresh));
  if (!noise.Decryptable(product + 4 * noise.AfterPlainMul(fresh))) {
    throw ParameterError("parameters cannot support one multiplication");
  }
  return p;
}

double HeParams::log_q() const {
  double bits = 0;
  for (uint64_t qi : ring.modulus_values()) bits += std::log2(double(qi));
  return bits;
}

int HeParams::relin_digits() const {
  int bits = 0;
  for (size_t k = 0; k < ring.limbs(); ++k) bits += ring.modulus(k).bit_count();
  return (bits + relin_decomp_bits - 1) / relin_decomp_bits;
}

}  // namespace sectrain::he
