#ifndef SECTRAIN_RING_MODULUS_H_
#define SECTRAIN_RING_MODULUS_H_

#include <cstdint>
#include <vector>

namespace sectrain::ring {

using u128 = unsigned __int128;

inline uint64_t MulHigh(uint64_t a, uint64_t b) {
  return static_cast<uint64_t>((u128(a) * b) >> 64);
}

// An odd-or-even modulus 2 <= p < 2^61 with Barrett reduction of 128-bit
// products.
class Modulus {
 public:
  static constexpr int kMaxBits = 61;

  Modulus() = default;
  explicit Modulus(uint64_t value);

  uint64_t value() const { return value_; }
  int bit_count() const { return bits_; }

  uint64_t Reduce(uint64_t a) const { return a >= value_ ? a % value_ : a; }
  uint64_t Reduce128(u128 z) const;

  uint64_t Add(uint64_t a, uint64_t b) const {
    uint64_t s = a + b;
    return s >= value_ ? s - value_ : s;
  }
  uint64_t Sub(uint64_t a, uint64_t b) const {
    return a >= b ? a - b : a + value_ - b;
  }
  uint64_t Neg(uint64_t a) const { return a == 0 ? 0 : value_ - a; }
  uint64_t Mul(uint64_t a, uint64_t b) const { return Reduce128(u128(a) * b); }
  uint64_t Pow(uint64_t base, uint64_t exp) const;
  // Inverse of a unit; throws ParameterError when gcd(a, p) != 1.
  uint64_t Inverse(uint64_t a) const;
  // Maps a signed integer to its residue.
  uint64_t FromSigned(int64_t v) const;
  // Centered lift into (-p/2, p/2].
  int64_t ToSigned(uint64_t v) const {
    return v > value_ / 2 ? static_cast<int64_t>(v) - static_cast<int64_t>(value_)
                          : static_cast<int64_t>(v);
  }

  friend bool operator==(const Modulus& a, const Modulus& b) {
    return a.value_ == b.value_;
  }

 private:
  uint64_t value_ = 0;
  int bits_ = 0;
  uint64_t ratio_hi_ = 0;  // floor(2^128 / p), high word
  uint64_t ratio_lo_ = 0;  // low word
};

// Shoup's precomputation floor(w * 2^64 / p) for repeated multiplication
// by the constant w.
inline uint64_t ShoupPrecompute(uint64_t w, uint64_t p) {
  return static_cast<uint64_t>((u128(w) << 64) / p);
}

inline uint64_t MulShoup(uint64_t a, uint64_t w, uint64_t w_shoup, uint64_t p) {
  const uint64_t q = MulHigh(a, w_shoup);
  const uint64_t r = a * w - q * p;
  return r >= p ? r - p : r;
}

// Deterministic Miller-Rabin for 64-bit inputs.
bool IsPrime(uint64_t n);

// The `count` largest primes below 2^bits congruent to 1 mod `two_n`,
// skipping any listed in `exclude`. Throws ParameterError if the search
// runs out of candidates.
std::vector<uint64_t> FindNttPrimes(int bits, uint64_t two_n, int count,
                                    const std::vector<uint64_t>& exclude = {});

// Smallest-base primitive 2N-th root of unity modulo prime p, where
// p = 1 mod 2N. Throws ParameterError otherwise.
uint64_t PrimitiveRoot2N(uint64_t p, uint64_t two_n);

}  // namespace sectrain::ring

#endif  // SECTRAIN_RING_MODULUS_H_
