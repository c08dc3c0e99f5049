#ifndef SECTRAIN_PACKING_CONV_SHAPE_H_
#define SECTRAIN_PACKING_CONV_SHAPE_H_

#include <algorithm>
#include <cstdint>

namespace sectrain::packing {

// Single-channel, stride-1 convolution of an H x W input with an h x h
// kernel and `pad` zeros on every side. Output (u, v) is
//   sum_{a,b} x[u - pad + a, v - pad + b] * w[a, b].
struct ConvShape {
  int H = 1;
  int W = 1;
  int h = 1;
  int pad = 0;

  // Throws ParameterError unless h >= 1, 0 <= pad <= h - 1 and the padded
  // input is at least h on each side.
  void Validate() const;

  int O() const { return std::max(H, W) + h - 1; }
  int padded_h() const { return H + 2 * pad; }
  int padded_w() const { return W + 2 * pad; }
  int out_h() const { return padded_h() - h + 1; }
  int out_w() const { return padded_w() - h + 1; }
};

}  // namespace sectrain::packing

#endif  // SECTRAIN_PACKING_CONV_SHAPE_H_
