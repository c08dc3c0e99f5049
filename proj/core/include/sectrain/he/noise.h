#ifndef SECTRAIN_HE_NOISE_H_
#define SECTRAIN_HE_NOISE_H_

#include "sectrain/he/params.h"

namespace sectrain::he {

// Conservative analytic bounds on the absolute noise v in
//   c0 + c1*s = (q/t)*m + v  (mod q),
// tracked per ciphertext. Decryption is exact while |v| < q/(2t).
class NoiseModel {
 public:
  explicit NoiseModel(const HeParams& params);

  double Fresh() const { return fresh_; }
  double AfterAdd(double a, double b) const { return a + b; }
  // Plaintext operand has centered coefficients bounded by t/2.
  double AfterPlainMul(double a) const;
  // Tensor product of two 2-part ciphertexts, before relinearization.
  double AfterTensor(double a, double b) const;
  double AfterRelin(double a) const { return a + relin_; }
  double Threshold() const { return threshold_; }
  bool Decryptable(double v) const { return v < threshold_; }

 private:
  double n_;
  double t_;
  double fresh_;
  double relin_;
  double threshold_;
};

}  // namespace sectrain::he

#endif  // SECTRAIN_HE_NOISE_H_
