#ifndef SECTRAIN_TRAIN_LAYERS_H_
#define SECTRAIN_TRAIN_LAYERS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "sectrain/packing/conv_shape.h"
#include "sectrain/train/engine.h"

namespace sectrain::train {

// Engine operation ids used by one layer.
struct OpIds {
  uint32_t forward = 0;
  uint32_t weight_grad = 1;
  uint32_t input_grad = 2;
  uint32_t extra = 3;

  static OpIds ForLayer(uint32_t layer) { return {8 * layer, 8 * layer + 1, 8 * layer + 2, 8 * layer + 3}; }
};

// Square conv layer. Strides above 1 run the stride-1 convolution and
// keep every stride-th output.
struct ConvGeom {
  int c_in = 1;
  int c_out = 1;
  int size = 1;  // input side
  int kernel = 1;
  int pad = 0;
  int stride = 1;

  int full() const { return size + 2 * pad - kernel + 1; }
  int out() const { return (full() - 1) / stride + 1; }
  packing::ConvShape forward_shape() const { return {size, size, kernel, pad}; }
  // x (*) dy with dy as the kernel; yields kernel x kernel.
  packing::ConvShape weight_grad_shape() const { return {size, size, full(), pad}; }
  // dy (*) rot180(w); yields size x size.
  packing::ConvShape input_grad_shape() const { return {full(), full(), kernel, kernel - 1 - pad}; }
};

struct LayerGrad {
  std::vector<int64_t> dx;
  std::vector<int64_t> dw;
  std::vector<int64_t> db;
};

void DeclareConv(Engine& e, const OpIds& ids, const ConvGeom& g, bool input_grad);
// y = (x (*) w) >> scale + b, c_out x out x out.
std::vector<int64_t> ConvForward(Engine& e, const OpIds& ids, const ConvGeom& g,
                                 std::span<const int64_t> x, std::span<const int64_t> w,
                                 std::span<const int64_t> b, int scale);
// dw = (x (*) dy) >> scale per input channel, db = sum dy and, when asked,
// dx = (sum_o dy_o (*) rot180(w_o)) >> scale.
LayerGrad ConvBackward(Engine& e, const OpIds& ids, const ConvGeom& g, std::span<const int64_t> x,
                       std::span<const int64_t> w, std::span<const int64_t> dy, int scale,
                       bool input_grad);
// Engine calls of each id per sample.
std::vector<std::pair<uint32_t, size_t>> ConvCalls(const OpIds& ids, const ConvGeom& g, bool input_grad);

void DeclareFc(Engine& e, const OpIds& ids, int n_in, int n_out, bool input_grad);
std::vector<int64_t> FcForward(Engine& e, const OpIds& ids, std::span<const int64_t> x,
                               std::span<const int64_t> w, std::span<const int64_t> b, int scale);
LayerGrad FcBackward(Engine& e, const OpIds& ids, int n_in, int n_out, std::span<const int64_t> x,
                     std::span<const int64_t> w, std::span<const int64_t> dy, int scale,
                     bool input_grad);
std::vector<std::pair<uint32_t, size_t>> FcCalls(const OpIds& ids, bool input_grad);

// Rotates each k x k kernel by 180 degrees and swaps the channel axes:
// out is c_in x c_out x k x k.
std::vector<int64_t> FlipKernels(std::span<const int64_t> w, int c_out, int c_in, int k);

// Softmax cross-entropy of fixed-point logits. The gradient is
// round((p - onehot) * 2^scale).
struct LossResult {
  double loss = 0;
  std::vector<int64_t> grad;
  int predicted = 0;
};
LossResult SoftmaxCrossEntropy(std::span<const int64_t> logits, int label, int scale);

}  // namespace sectrain::train

#endif  // SECTRAIN_TRAIN_LAYERS_H_
