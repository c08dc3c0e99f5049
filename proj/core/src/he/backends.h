#ifndef SECTRAIN_SRC_HE_BACKENDS_H_
#define SECTRAIN_SRC_HE_BACKENDS_H_

#include <memory>
#include <vector>

#include "sectrain/he/scheme.h"
#include "sectrain/ring/ntt.h"

namespace sectrain::he {

// Payload carried in the clear as (m, 0) over the plaintext ring. Noise is
// tracked with the RLWE model so both backends fail identically.
class TransparentScheme final : public Scheme {
 public:
  explicit TransparentScheme(const HeParams& params) : Scheme(params) {}

  Backend backend() const override { return Backend::kTransparent; }
  const ring::RingParams& cipher_ring() const override { return params().plain; }
  KeySet KeyGen(uint64_t seed) const override;
  Ciphertext Encrypt(const ring::RingElem& m, const KeySet& keys, Prng& rng) const override;
  ring::RingElem Decrypt(const Ciphertext& c, const KeySet& keys) const override;
  Ciphertext MultiplyPlain(const Ciphertext& c, const ring::RingElem& pt) const override;
  Ciphertext Multiply(const Ciphertext& a, const Ciphertext& b) const override;
  Ciphertext Relinearize(const Ciphertext& c, const KeySet& keys) const override;
};

class RlweScheme final : public Scheme {
 public:
  explicit RlweScheme(const HeParams& params);

  Backend backend() const override { return Backend::kRlwe; }
  const ring::RingParams& cipher_ring() const override { return params().ring; }
  KeySet KeyGen(uint64_t seed) const override;
  Ciphertext Encrypt(const ring::RingElem& m, const KeySet& keys, Prng& rng) const override;
  ring::RingElem Decrypt(const Ciphertext& c, const KeySet& keys) const override;
  Ciphertext MultiplyPlain(const Ciphertext& c, const ring::RingElem& pt) const override;
  Ciphertext Multiply(const Ciphertext& a, const Ciphertext& b) const override;
  Ciphertext Relinearize(const Ciphertext& c, const KeySet& keys) const override;

 private:
  using u128 = unsigned __int128;

  // x in [0, q) from its residues.
  u128 Compose(uint64_t r0, uint64_t r1) const;
  // round(t * x / q) for x in [0, q) given as mixed-radix digits v0 + v1*q0.
  u128 ScaleRound(uint64_t v0, uint64_t v1) const;
  ring::RingElem SampleUniform(Prng& rng) const;
  ring::RingElem SampleError(Prng& rng) const;
  ring::RingElem SampleTernary(Prng& rng) const;

  size_t limbs_;
  uint64_t t_;
  u128 q_;
  u128 delta_;       // floor(q / t)
  uint64_t r_t_;     // q mod t
  uint64_t q0_inv_;  // q0^{-1} mod q1

  // Extended basis for the exact tensor product: the q primes followed by
  // auxiliary primes.
  std::vector<ring::Modulus> basis_;
  std::vector<std::shared_ptr<const ring::NttTables>> basis_ntt_;
  // prefix_mod_[i][j] = (p_0 * ... * p_{j-1}) mod p_i, j <= i.
  std::vector<std::vector<uint64_t>> prefix_mod_;
  std::vector<uint64_t> prefix_inv_;  // (p_0 * ... * p_{i-1})^{-1} mod p_i
  // lift_[i][k] = t * (p_0 * ... * p_{i-1}) / q mod q_k for i >= limbs.
  std::vector<std::vector<uint64_t>> lift_;
  std::vector<uint64_t> wrap_;  // t * M / q mod q_k
};

}  // namespace sectrain::he

#endif  // SECTRAIN_SRC_HE_BACKENDS_H_
