#ifndef SECTRAIN_RING_RING_H_
#define SECTRAIN_RING_RING_H_

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "sectrain/common/bytes.h"
#include "sectrain/ring/modulus.h"
#include "sectrain/ring/ntt.h"

namespace sectrain::ring {

// Parameters of A_{N,p} = Z_p[x]/(x^N + 1). The coefficient modulus is
// either a single word modulus or a product of two (stored in RNS form, one
// limb per factor). NTT multiplication is enabled when every limb is a
// prime congruent to 1 mod 2N; otherwise multiplication falls back to the
// schoolbook algorithm.
class RingParams {
 public:
  static constexpr size_t kMaxLimbs = 2;

  RingParams() = default;
  static RingParams Create(uint32_t degree, std::vector<uint64_t> moduli);
  static RingParams Create(uint32_t degree, uint64_t modulus) {
    return Create(degree, std::vector<uint64_t>{modulus});
  }

  uint32_t degree() const;
  size_t limbs() const;
  const Modulus& modulus(size_t limb = 0) const;
  std::vector<uint64_t> modulus_values() const;
  bool ntt_enabled() const;
  // Requires ntt_enabled().
  const NttTables& ntt(size_t limb) const;
  bool valid() const { return data_ != nullptr; }

  friend bool operator==(const RingParams& a, const RingParams& b);

 private:
  struct Data;
  std::shared_ptr<const Data> data_;
};

enum class Domain : uint8_t { kCoefficient, kEvaluation };

// An element of A_{N,p}; coefficient of x^i at index i. Immutable after
// construction. In the evaluation domain the values are NTT outputs.
class RingElem {
 public:
  RingElem() = default;
  // The zero polynomial.
  explicit RingElem(RingParams params, Domain domain = Domain::kCoefficient);

  // `coeffs` holds either N residues (replicated into every limb after
  // reduction) or limbs*N residues laid out limb-major. Values >= modulus
  // are rejected.
  static RingElem FromCoeffs(RingParams params, std::span<const uint64_t> coeffs);
  // Signed integers reduced into every limb.
  static RingElem FromSigned(RingParams params, std::span<const int64_t> coeffs);
  static RingElem Monomial(RingParams params, uint32_t exponent, int64_t scale = 1);
  static RingElem Constant(RingParams params, int64_t value) {
    return Monomial(std::move(params), 0, value);
  }

  const RingParams& params() const { return params_; }
  uint32_t degree() const { return params_.degree(); }
  size_t limbs() const { return params_.limbs(); }
  Domain domain() const { return domain_; }

  uint64_t coeff(size_t index, size_t limb = 0) const {
    return data_[limb * degree() + index];
  }
  std::span<const uint64_t> limb(size_t k) const {
    return {data_.data() + k * degree(), degree()};
  }
  std::span<const uint64_t> raw() const { return data_; }
  // Centered lift of each coefficient; single-limb rings only.
  std::vector<int64_t> ToSigned() const;
  bool IsZero() const;

  friend bool operator==(const RingElem& a, const RingElem& b);

 private:
  friend class RingElemBuilder;
  RingElem(RingParams params, Domain domain, std::vector<uint64_t> data)
      : params_(std::move(params)), domain_(domain), data_(std::move(data)) {}

  RingParams params_;
  Domain domain_ = Domain::kCoefficient;
  std::vector<uint64_t> data_;
};

// Mutable staging buffer for assembling a RingElem in place without
// copying; used by the arithmetic kernels and by packing.
class RingElemBuilder {
 public:
  explicit RingElemBuilder(RingParams params, Domain domain = Domain::kCoefficient);
  explicit RingElemBuilder(RingElem elem);

  std::span<uint64_t> limb(size_t k) {
    return {data_.data() + k * params_.degree(), params_.degree()};
  }
  // Sets coefficient `index` in every limb from a signed value.
  void SetSigned(size_t index, int64_t value);
  void Set(size_t index, size_t limb, uint64_t value) {
    data_[limb * params_.degree() + index] = value;
  }
  const RingParams& params() const { return params_; }
  RingElem Build() &&;

 private:
  RingParams params_;
  Domain domain_;
  std::vector<uint64_t> data_;
};

RingElem Add(const RingElem& a, const RingElem& b);
RingElem Sub(const RingElem& a, const RingElem& b);
RingElem Negate(const RingElem& a);
// Negacyclic product; NTT when the ring allows it, schoolbook otherwise.
// Both operands must be in the coefficient domain.
RingElem Mul(const RingElem& a, const RingElem& b);
// Direct O(N^2) negacyclic product with sign folding.
RingElem MulSchoolbook(const RingElem& a, const RingElem& b);
RingElem MulScalar(const RingElem& a, int64_t scalar);

RingElem NttForward(const RingElem& a);
RingElem NttInverse(const RingElem& a);
// Coefficient-wise product; both operands in the evaluation domain.
RingElem PointwiseMul(const RingElem& a, const RingElem& b);

inline RingElem operator+(const RingElem& a, const RingElem& b) { return Add(a, b); }
inline RingElem operator-(const RingElem& a, const RingElem& b) { return Sub(a, b); }
inline RingElem operator-(const RingElem& a) { return Negate(a); }
inline RingElem operator*(const RingElem& a, const RingElem& b) { return Mul(a, b); }

// Wire format: degree (u32 LE), limb count (u8), then for each coefficient
// in order its limbs as u64 LE.
void Serialize(const RingElem& a, ByteWriter& out);
RingElem Deserialize(ByteReader& in, const RingParams& params);
size_t SerializedSize(const RingParams& params);

}  // namespace sectrain::ring

#endif  // SECTRAIN_RING_RING_H_
