#include "sectrain/ring/modulus.h"

#include <algorithm>
#include <bit>
#include <string>

#include "sectrain/common/errors.h"

namespace sectrain::ring {

Modulus::Modulus(uint64_t value) : value_(value) {
  if (value < 2 || std::bit_width(value) > kMaxBits) {
    throw ParameterError("modulus must lie in [2, 2^61): " + std::to_string(value));
  }
  bits_ = std::bit_width(value);
  const u128 all = ~u128(0);
  u128 q = all / value;
  if (static_cast<uint64_t>(all % value) == value - 1) ++q;
  ratio_hi_ = static_cast<uint64_t>(q >> 64);
  ratio_lo_ = static_cast<uint64_t>(q);
}

uint64_t Modulus::Reduce128(u128 z) const {
  const uint64_t lo = static_cast<uint64_t>(z);
  const uint64_t hi = static_cast<uint64_t>(z >> 64);
  // Approximates floor(z * ratio / 2^128); only the low word of the quotient
  // matters because the remainder fits in one word.
  const uint64_t carry = MulHigh(lo, ratio_lo_);
  const u128 t1 = u128(lo) * ratio_hi_ + carry;
  const u128 t2 = u128(hi) * ratio_lo_ + static_cast<uint64_t>(t1);
  const uint64_t q = hi * ratio_hi_ + static_cast<uint64_t>(t1 >> 64) +
                     static_cast<uint64_t>(t2 >> 64);
  uint64_t r = lo - q * value_;
  return r >= value_ ? r - value_ : r;
}

uint64_t Modulus::Pow(uint64_t base, uint64_t exp) const {
  uint64_t result = 1 % value_;
  base = Reduce(base);
  while (exp) {
    if (exp & 1) result = Mul(result, base);
    base = Mul(base, base);
    exp >>= 1;
  }
  return result;
}

uint64_t Modulus::Inverse(uint64_t a) const {
  // Extended Euclid on signed 128-bit values.
  __int128 t = 0, new_t = 1;
  __int128 r = value_, new_r = Reduce(a);
  while (new_r != 0) {
    __int128 q = r / new_r;
    __int128 tmp = t - q * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - q * new_r;
    r = new_r;
    new_r = tmp;
  }
  if (r != 1) throw ParameterError("element is not invertible");
  if (t < 0) t += value_;
  return static_cast<uint64_t>(t);
}

uint64_t Modulus::FromSigned(int64_t v) const {
  if (v >= 0) return Reduce(static_cast<uint64_t>(v));
  // -v may not be representable; work in unsigned arithmetic.
  const uint64_t mag = Reduce(uint64_t(0) - static_cast<uint64_t>(v));
  return Neg(mag);
}

namespace {

uint64_t PowMod(uint64_t b, uint64_t e, uint64_t m) {
  u128 r = 1 % m, x = b % m;
  while (e) {
    if (e & 1) r = r * x % m;
    x = x * x % m;
    e >>= 1;
  }
  return static_cast<uint64_t>(r);
}

}  // namespace

bool IsPrime(uint64_t n) {
  if (n < 2) return false;
  static constexpr uint64_t kBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (uint64_t p : kBases) {
    if (n % p == 0) return n == p;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (uint64_t a : kBases) {
    uint64_t x = PowMod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = static_cast<uint64_t>(u128(x) * x % n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<uint64_t> FindNttPrimes(int bits, uint64_t two_n, int count,
                                    const std::vector<uint64_t>& exclude) {
  if (bits < 2 || bits > Modulus::kMaxBits || two_n == 0) {
    throw ParameterError("FindNttPrimes: bad bit size");
  }
  std::vector<uint64_t> out;
  const uint64_t top = uint64_t(1) << bits;
  // Largest candidate of the form k * 2N + 1 below 2^bits.
  uint64_t k = (top - 2) / two_n;
  for (; k > 0 && static_cast<int>(out.size()) < count; --k) {
    const uint64_t p = k * two_n + 1;
    if (std::find(exclude.begin(), exclude.end(), p) != exclude.end()) continue;
    if (IsPrime(p)) out.push_back(p);
  }
  if (static_cast<int>(out.size()) < count) {
    throw ParameterError("not enough NTT-friendly primes below 2^" +
                         std::to_string(bits));
  }
  return out;
}

uint64_t PrimitiveRoot2N(uint64_t p, uint64_t two_n) {
  if (!IsPrime(p) || (p - 1) % two_n != 0) {
    throw ParameterError("modulus " + std::to_string(p) +
                         " is not an NTT-friendly prime for 2N=" +
                         std::to_string(two_n));
  }
  const Modulus mod(p);
  const uint64_t n = two_n / 2;
  for (uint64_t x = 2; x < p; ++x) {
    const uint64_t psi = mod.Pow(x, (p - 1) / two_n);
    // Order divides 2N (a power of two); psi^N = -1 pins it to exactly 2N.
    if (mod.Pow(psi, n) == p - 1) return psi;
  }
  throw ParameterError("no primitive 2N-th root found");
}

}  // namespace sectrain::ring
