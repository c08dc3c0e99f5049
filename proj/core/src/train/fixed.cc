#include "sectrain/train/fixed.h"

#include <cmath>
#include <string>

#include "sectrain/common/errors.h"

namespace sectrain::train {

size_t ShapeSize(const std::vector<int>& shape) {
  size_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw ParameterError("tensor dimensions must be positive");
    n *= size_t(d);
  }
  return n;
}

FixTensor::FixTensor(std::vector<int> s, int sc, int b)
    : shape(std::move(s)), data(ShapeSize(shape)), scale(sc), bits(b) {}

FixTensor::FixTensor(std::vector<int> s, std::vector<int64_t> d, int sc, int b)
    : shape(std::move(s)), data(std::move(d)), scale(sc), bits(b) {
  if (data.size() != ShapeSize(shape)) throw ParameterError("tensor data does not match shape");
}

void FixTensor::CheckRange() const { CheckBits(data, bits, "tensor"); }

double FixTensor::ToDouble(size_t i) const { return FromFixed(data.at(i), scale); }

FixTensor FixTensor::Quantize(std::vector<int> shape, std::span<const double> values, int scale,
                              int bits) {
  FixTensor t(std::move(shape), scale, bits);
  if (values.size() != t.size()) throw ParameterError("tensor data does not match shape");
  for (size_t i = 0; i < values.size(); ++i) t.data[i] = ToFixed(values[i], scale);
  t.CheckRange();
  return t;
}

int64_t ToFixed(double v, int scale) {
  const double s = std::ldexp(v, scale);
  if (!std::isfinite(s) || std::fabs(s) >= 0x1p62) throw OverflowError("value out of fixed-point range");
  return std::llround(s);
}

double FromFixed(int64_t v, int scale) { return std::ldexp(double(v), -scale); }

void TruncateInPlace(std::span<int64_t> v, int s) {
  for (auto& e : v) e >>= s;
}

void CheckBits(std::span<const int64_t> v, int bits, const char* what) {
  const int64_t bound = int64_t(1) << (bits - 1);
  for (int64_t e : v) {
    if (e >= bound || e <= -bound) {
      throw OverflowError(std::string(what) + " value " + std::to_string(e) + " exceeds " +
                          std::to_string(bits) + " bits");
    }
  }
}

}  // namespace sectrain::train
