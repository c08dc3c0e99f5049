#include "sectrain/he/noise.h"

#include <cmath>

namespace sectrain::he {

NoiseModel::NoiseModel(const HeParams& params)
    : n_(params.degree()), t_(double(params.plain_modulus())) {
  const double bound = std::ceil(6 * params.noise_stddev);
  fresh_ = bound * (2 * n_ + 1) + 0.5;
  relin_ = params.relin_digits() * n_ * (std::ldexp(1.0, params.relin_decomp_bits) - 1) * bound;
  threshold_ = std::exp2(params.log_q()) / (2 * t_);
}

double NoiseModel::AfterPlainMul(double a) const { return n_ * (t_ / 2) * a; }

double NoiseModel::AfterTensor(double a, double b) const {
  // |c0 + c1*s| <= q(N+1)/2, so the integer carry polynomial is bounded
  // by (N+5)/2 with room for the payload and noise terms.
  const double carry = (n_ + 5) / 2;
  const double q = 2 * t_ * threshold_;
  return n_ * t_ * (a + b) * (1 + carry) + n_ * t_ * a * b / q +
         (1 + n_ + n_ * n_) / 2;
}

}  // namespace sectrain::he
