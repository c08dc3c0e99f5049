#ifndef SECTRAIN_TRAIN_FIXED_H_
#define SECTRAIN_TRAIN_FIXED_H_

#include <cstdint>
#include <span>
#include <vector>

namespace sectrain::train {

// Signed fixed-point values with `scale` fractional bits that must fit
// `bits` signed bits.
struct FixTensor {
  std::vector<int> shape;
  std::vector<int64_t> data;
  int scale = 12;
  int bits = 32;

  FixTensor() = default;
  FixTensor(std::vector<int> shape, int scale, int bits);
  FixTensor(std::vector<int> shape, std::vector<int64_t> data, int scale, int bits);

  size_t size() const { return data.size(); }
  // Throws OverflowError when an entry leaves (-2^(bits-1), 2^(bits-1)).
  void CheckRange() const;
  double ToDouble(size_t i) const;
  static FixTensor Quantize(std::vector<int> shape, std::span<const double> values, int scale,
                            int bits);
};

size_t ShapeSize(const std::vector<int>& shape);

// Round-to-nearest of v * 2^scale; ties away from zero.
int64_t ToFixed(double v, int scale);
double FromFixed(int64_t v, int scale);
// Arithmetic shift right (floor division by 2^s).
inline int64_t Truncate(int64_t v, int s) { return v >> s; }
void TruncateInPlace(std::span<int64_t> v, int s);
// Throws OverflowError unless |v| < 2^(bits-1) for every entry.
void CheckBits(std::span<const int64_t> v, int bits, const char* what);

}  // namespace sectrain::train

#endif  // SECTRAIN_TRAIN_FIXED_H_
