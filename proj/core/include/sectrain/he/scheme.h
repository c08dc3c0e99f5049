#ifndef SECTRAIN_HE_SCHEME_H_
#define SECTRAIN_HE_SCHEME_H_

#include <cstdint>
#include <memory>

#include "sectrain/common/prng.h"
#include "sectrain/he/ciphertext.h"
#include "sectrain/he/keys.h"
#include "sectrain/he/noise.h"
#include "sectrain/he/params.h"

namespace sectrain::he {

// Raw scheme operations without metering. Plaintexts live in params().plain.
class Scheme {
 public:
  explicit Scheme(HeParams params) : params_(std::move(params)), noise_(params_) {}
  virtual ~Scheme() = default;

  virtual Backend backend() const = 0;
  const HeParams& params() const { return params_; }
  const NoiseModel& noise() const { return noise_; }
  // Ring over which ciphertext parts live.
  virtual const ring::RingParams& cipher_ring() const = 0;

  virtual KeySet KeyGen(uint64_t seed) const = 0;
  virtual Ciphertext Encrypt(const ring::RingElem& m, const KeySet& keys, Prng& rng) const = 0;
  // Throws DecryptionFailure when the noise bound exceeds the budget.
  virtual ring::RingElem Decrypt(const Ciphertext& c, const KeySet& keys) const = 0;
  virtual Ciphertext MultiplyPlain(const Ciphertext& c, const ring::RingElem& pt) const = 0;
  // Three-part tensor product.
  virtual Ciphertext Multiply(const Ciphertext& a, const Ciphertext& b) const = 0;
  virtual Ciphertext Relinearize(const Ciphertext& c, const KeySet& keys) const = 0;
  Ciphertext Add(const Ciphertext& a, const Ciphertext& b) const;

  double FreshNoise() const { return noise_.Fresh(); }

 protected:
  void CheckPlain(const ring::RingElem& m) const;
  void CheckOwn(const Ciphertext& c) const;

 private:
  HeParams params_;
  NoiseModel noise_;
};

std::shared_ptr<const Scheme> MakeScheme(Backend backend, const HeParams& params);

}  // namespace sectrain::he

#endif  // SECTRAIN_HE_SCHEME_H_
