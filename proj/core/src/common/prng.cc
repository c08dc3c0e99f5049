#include "sectrain/common/prng.h"

#include <bit>
#include <cmath>
#include <mutex>
#include <map>
#include <vector>

namespace sectrain {

uint64_t MixSeed(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Prng::Prng(uint64_t seed, std::initializer_list<uint64_t> domain) {
  uint64_t s = MixSeed(seed);
  for (uint64_t d : domain) s = MixSeed(s ^ MixSeed(d + 0x632be59bd9b4e019ULL));
  engine_.seed(s);
}

uint64_t Prng::Uniform(uint64_t bound) {
  if ((bound & (bound - 1)) == 0) return engine_() & (bound - 1);
  const uint64_t mask = ~uint64_t(0) >> std::countl_zero(bound - 1);
  for (;;) {
    uint64_t v = engine_() & mask;
    if (v < bound) return v;
  }
}

uint64_t Prng::Bits(int bits) {
  uint64_t v = engine_();
  return bits >= 64 ? v : v & ((uint64_t(1) << bits) - 1);
}

double Prng::UnitDouble() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

int Prng::Ternary() { return static_cast<int>(Uniform(3)) - 1; }

namespace {

// Cumulative distribution of |X| for the rounded Gaussian.
const std::vector<double>& CdtTable(double stddev) {
  static std::mutex mu;
  static std::map<double, std::vector<double>> tables;
  std::lock_guard<std::mutex> lock(mu);
  auto it = tables.find(stddev);
  if (it != tables.end()) return it->second;
  const int bound = static_cast<int>(std::ceil(6 * stddev));
  std::vector<double> weights(bound + 1);
  double total = 0;
  for (int k = 0; k <= bound; ++k) {
    weights[k] = std::exp(-double(k) * k / (2 * stddev * stddev)) * (k ? 2 : 1);
    total += weights[k];
  }
  std::vector<double> cdf(bound + 1);
  double acc = 0;
  for (int k = 0; k <= bound; ++k) {
    acc += weights[k] / total;
    cdf[k] = acc;
  }
  cdf[bound] = 1.0;
  return tables.emplace(stddev, std::move(cdf)).first->second;
}

}  // namespace

int64_t Prng::Gaussian(double stddev) {
  const auto& cdf = CdtTable(stddev);
  const double u = UnitDouble();
  int64_t k = 0;
  while (k + 1 < static_cast<int64_t>(cdf.size()) && u >= cdf[k]) ++k;
  if (k == 0) return 0;
  return (engine_() & 1) ? k : -k;
}

}  // namespace sectrain
