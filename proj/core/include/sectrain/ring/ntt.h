#ifndef SECTRAIN_RING_NTT_H_
#define SECTRAIN_RING_NTT_H_

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "sectrain/ring/modulus.h"

namespace sectrain::ring {

// Negacyclic number-theoretic transform over Z_p[x]/(x^N + 1), p = 1 mod 2N.
// Forward uses Cooley-Tukey butterflies and produces bit-reversed
// evaluations at the odd powers of a primitive 2N-th root; Inverse undoes it
// with Gentleman-Sande butterflies, including the 1/N scaling.
class NttTables {
 public:
  NttTables(uint32_t degree, const Modulus& modulus);

  // Shared, immutable tables for (degree, modulus).
  static std::shared_ptr<const NttTables> Get(uint32_t degree, const Modulus& modulus);

  void Forward(std::span<uint64_t> values) const;
  void Inverse(std::span<uint64_t> values) const;

  uint32_t degree() const { return degree_; }
  const Modulus& modulus() const { return modulus_; }
  uint64_t root() const { return root_; }

 private:
  uint32_t degree_;
  Modulus modulus_;
  uint64_t root_;
  std::vector<uint64_t> psi_rev_, psi_rev_shoup_;
  std::vector<uint64_t> psi_inv_rev_, psi_inv_rev_shoup_;
  uint64_t n_inv_, n_inv_shoup_;
};

}  // namespace sectrain::ring

#endif  // SECTRAIN_RING_NTT_H_
