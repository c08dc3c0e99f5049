#include "sectrain/ring/ntt.h"

#include <bit>
#include <map>
#include <mutex>
#include <utility>

#include "sectrain/common/errors.h"

namespace sectrain::ring {

namespace {

uint32_t BitReverse(uint32_t x, int bits) {
  uint32_t r = 0;
  for (int i = 0; i < bits; ++i) r |= ((x >> i) & 1u) << (bits - 1 - i);
  return r;
}

}  // namespace

NttTables::NttTables(uint32_t degree, const Modulus& modulus)
    : degree_(degree), modulus_(modulus) {
  if (degree < 2 || !std::has_single_bit(degree)) {
    throw ParameterError("NTT degree must be a power of two >= 2");
  }
  const uint64_t p = modulus.value();
  root_ = PrimitiveRoot2N(p, 2 * uint64_t(degree));
  const uint64_t root_inv = modulus.Inverse(root_);
  const int logn = std::countr_zero(degree);

  psi_rev_.resize(degree);
  psi_inv_rev_.resize(degree);
  psi_rev_shoup_.resize(degree);
  psi_inv_rev_shoup_.resize(degree);
  uint64_t pw = 1, pw_inv = 1;
  std::vector<uint64_t> powers(degree), inv_powers(degree);
  for (uint32_t i = 0; i < degree; ++i) {
    powers[i] = pw;
    inv_powers[i] = pw_inv;
    pw = modulus.Mul(pw, root_);
    pw_inv = modulus.Mul(pw_inv, root_inv);
  }
  for (uint32_t i = 0; i < degree; ++i) {
    const uint32_t r = BitReverse(i, logn);
    psi_rev_[i] = powers[r];
    psi_inv_rev_[i] = inv_powers[r];
    psi_rev_shoup_[i] = ShoupPrecompute(psi_rev_[i], p);
    psi_inv_rev_shoup_[i] = ShoupPrecompute(psi_inv_rev_[i], p);
  }
  n_inv_ = modulus.Inverse(degree);
  n_inv_shoup_ = ShoupPrecompute(n_inv_, p);
}

std::shared_ptr<const NttTables> NttTables::Get(uint32_t degree, const Modulus& modulus) {
  static std::mutex mu;
  static std::map<std::pair<uint32_t, uint64_t>, std::shared_ptr<const NttTables>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(degree, modulus.value());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto tables = std::make_shared<const NttTables>(degree, modulus);
  cache.emplace(key, tables);
  return tables;
}

void NttTables::Forward(std::span<uint64_t> a) const {
  const uint64_t p = modulus_.value();
  uint32_t t = degree_;
  for (uint32_t m = 1; m < degree_; m <<= 1) {
    t >>= 1;
    for (uint32_t i = 0; i < m; ++i) {
      const uint32_t j1 = 2 * i * t;
      const uint64_t w = psi_rev_[m + i];
      const uint64_t ws = psi_rev_shoup_[m + i];
      for (uint32_t j = j1; j < j1 + t; ++j) {
        const uint64_t u = a[j];
        const uint64_t v = MulShoup(a[j + t], w, ws, p);
        const uint64_t s = u + v;
        a[j] = s >= p ? s - p : s;
        a[j + t] = u >= v ? u - v : u + p - v;
      }
    }
  }
}

void NttTables::Inverse(std::span<uint64_t> a) const {
  const uint64_t p = modulus_.value();
  uint32_t t = 1;
  for (uint32_t m = degree_; m > 1; m >>= 1) {
    const uint32_t h = m >> 1;
    uint32_t j1 = 0;
    for (uint32_t i = 0; i < h; ++i) {
      const uint64_t w = psi_inv_rev_[h + i];
      const uint64_t ws = psi_inv_rev_shoup_[h + i];
      for (uint32_t j = j1; j < j1 + t; ++j) {
        const uint64_t u = a[j];
        const uint64_t v = a[j + t];
        const uint64_t s = u + v;
        a[j] = s >= p ? s - p : s;
        a[j + t] = MulShoup(u >= v ? u - v : u + p - v, w, ws, p);
      }
      j1 += 2 * t;
    }
    t <<= 1;
  }
  for (auto& x : a) x = MulShoup(x, n_inv_, n_inv_shoup_, p);
}

}  // namespace sectrain::ring
