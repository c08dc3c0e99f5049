#ifndef SECTRAIN_COMMON_PRNG_H_
#define SECTRAIN_COMMON_PRNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace sectrain {

// Seeded deterministic generator. Built on mt19937_64, whose output sequence
// is fixed by the standard, and avoids the implementation-defined standard
// distributions so that identical seeds give identical streams everywhere.
class Prng {
 public:
  explicit Prng(uint64_t seed) : engine_(seed) {}
  // Derives a stream from a seed and a list of domain-separation words.
  Prng(uint64_t seed, std::initializer_list<uint64_t> domain);

  uint64_t Next() { return engine_(); }
  // Uniform in [0, bound); bound > 0.
  uint64_t Uniform(uint64_t bound);
  // Uniform in [0, 2^bits), bits in [1, 64].
  uint64_t Bits(int bits);
  // Uniform in [0, 1).
  double UnitDouble();
  // -1, 0 or 1 with equal probability.
  int Ternary();
  // Rounded Gaussian with the given deviation, clipped at 6 sigma.
  int64_t Gaussian(double stddev);

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finaliser; used to derive sub-seeds.
uint64_t MixSeed(uint64_t x);

}  // namespace sectrain

#endif  // SECTRAIN_COMMON_PRNG_H_
