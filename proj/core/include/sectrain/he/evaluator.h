#ifndef SECTRAIN_HE_EVALUATOR_H_
#define SECTRAIN_HE_EVALUATOR_H_

#include <cstdint>
#include <memory>

#include "sectrain/common/prng.h"
#include "sectrain/he/meter.h"
#include "sectrain/he/scheme.h"

namespace sectrain::he {

// Backend-agnostic, metered front end used by the protocols. One per party.
// The meter, if given, must outlive the evaluator.
class Evaluator {
 public:
  Evaluator(std::shared_ptr<const Scheme> scheme, KeySet keys, OpMeter* meter,
            uint64_t seed);

  const Scheme& scheme() const { return *scheme_; }
  const HeParams& params() const { return scheme_->params(); }
  const KeySet& keys() const { return keys_; }
  Backend backend() const { return scheme_->backend(); }
  OpMeter* meter() const { return meter_; }

  Ciphertext Encrypt(const ring::RingElem& m);
  ring::RingElem Decrypt(const Ciphertext& c) const;
  Ciphertext CpMul(const Ciphertext& c, const ring::RingElem& pt) const;
  // Tensor product followed by relinearization.
  Ciphertext CcMul(const Ciphertext& a, const Ciphertext& b) const;
  Ciphertext CcAdd(const Ciphertext& a, const Ciphertext& b) const;
  ring::RingElem PpMul(const ring::RingElem& a, const ring::RingElem& b) const;

  // Receiving side of the ciphertext wire format.
  Ciphertext ReadCiphertext(ByteReader& in, double noise) const;

 private:
  std::shared_ptr<const Scheme> scheme_;
  KeySet keys_;
  OpMeter* meter_;
  Prng rng_;
};

}  // namespace sectrain::he

#endif  // SECTRAIN_HE_EVALUATOR_H_
