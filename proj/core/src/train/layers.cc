#include "sectrain/train/layers.h"

#include <algorithm>
#include <cmath>

#include "sectrain/common/errors.h"
#include "sectrain/train/fixed.h"

namespace sectrain::train {

void DeclareConv(Engine& e, const OpIds& ids, const ConvGeom& g, bool input_grad) {
  if (g.full() <= g.pad) throw ParameterError("conv output too small for its padding");
  e.Declare(ids.forward, LinearSpec::Conv(g.c_in, g.c_out, g.forward_shape()));
  e.Declare(ids.weight_grad, LinearSpec::Conv(1, g.c_out, g.weight_grad_shape()));
  if (input_grad) e.Declare(ids.input_grad, LinearSpec::Conv(g.c_out, g.c_in, g.input_grad_shape()));
}

std::vector<std::pair<uint32_t, size_t>> ConvCalls(const OpIds& ids, const ConvGeom& g, bool input_grad) {
  std::vector<std::pair<uint32_t, size_t>> calls{{ids.forward, 1}, {ids.weight_grad, size_t(g.c_in)}};
  if (input_grad) calls.emplace_back(ids.input_grad, 1);
  return calls;
}

std::vector<int64_t> ConvForward(Engine& e, const OpIds& ids, const ConvGeom& g,
                                 std::span<const int64_t> x, std::span<const int64_t> w,
                                 std::span<const int64_t> b, int scale) {
  const auto full = e.Linear(ids.forward, x, w);
  const int f = g.full(), n = g.out();
  std::vector<int64_t> y(size_t(g.c_out) * n * n);
  for (int o = 0; o < g.c_out; ++o) {
    for (int u = 0; u < n; ++u) {
      for (int v = 0; v < n; ++v) {
        const int64_t raw = full[(size_t(o) * f + u * g.stride) * f + v * g.stride];
        y[(size_t(o) * n + u) * n + v] = Truncate(raw, scale) + b[o];
      }
    }
  }
  return y;
}

std::vector<int64_t> FlipKernels(std::span<const int64_t> w, int c_out, int c_in, int k) {
  std::vector<int64_t> r(w.size());
  const size_t kk = size_t(k) * k;
  for (int o = 0; o < c_out; ++o) {
    for (int c = 0; c < c_in; ++c) {
      const int64_t* src = w.data() + (size_t(o) * c_in + c) * kk;
      int64_t* dst = r.data() + (size_t(c) * c_out + o) * kk;
      for (size_t i = 0; i < kk; ++i) dst[i] = src[kk - 1 - i];
    }
  }
  return r;
}

LayerGrad ConvBackward(Engine& e, const OpIds& ids, const ConvGeom& g, std::span<const int64_t> x,
                       std::span<const int64_t> w, std::span<const int64_t> dy, int scale,
                       bool input_grad) {
  const int f = g.full(), n = g.out(), k = g.kernel;
  const size_t in = size_t(g.size) * g.size, kk = size_t(k) * k;
  // Gradient of the stride-1 output; skipped positions get zero.
  std::vector<int64_t> dfull(size_t(g.c_out) * f * f);
  for (int o = 0; o < g.c_out; ++o) {
    for (int u = 0; u < n; ++u) {
      for (int v = 0; v < n; ++v) {
        dfull[(size_t(o) * f + u * g.stride) * f + v * g.stride] = dy[(size_t(o) * n + u) * n + v];
      }
    }
  }
  LayerGrad r;
  r.db.assign(g.c_out, 0);
  for (int o = 0; o < g.c_out; ++o) {
    for (size_t i = 0; i < size_t(n) * n; ++i) r.db[o] += dy[o * size_t(n) * n + i];
  }
  r.dw.assign(size_t(g.c_out) * g.c_in * kk, 0);
  for (int c = 0; c < g.c_in; ++c) {
    const auto part = e.Linear(ids.weight_grad, x.subspan(c * in, in), dfull);
    for (int o = 0; o < g.c_out; ++o) {
      for (size_t i = 0; i < kk; ++i) r.dw[(size_t(o) * g.c_in + c) * kk + i] = Truncate(part[o * kk + i], scale);
    }
  }
  if (input_grad) {
    r.dx = e.Linear(ids.input_grad, dfull, FlipKernels(w, g.c_out, g.c_in, k));
    TruncateInPlace(r.dx, scale);
  }
  return r;
}

void DeclareFc(Engine& e, const OpIds& ids, int n_in, int n_out, bool input_grad) {
  e.Declare(ids.forward, LinearSpec::MatVec(n_in, n_out));
  e.Declare(ids.weight_grad, LinearSpec::Outer(n_in, n_out));
  if (input_grad) e.Declare(ids.input_grad, LinearSpec::MatVec(n_out, n_in));
}

std::vector<std::pair<uint32_t, size_t>> FcCalls(const OpIds& ids, bool input_grad) {
  std::vector<std::pair<uint32_t, size_t>> calls{{ids.forward, 1}, {ids.weight_grad, 1}};
  if (input_grad) calls.emplace_back(ids.input_grad, 1);
  return calls;
}

std::vector<int64_t> FcForward(Engine& e, const OpIds& ids, std::span<const int64_t> x,
                               std::span<const int64_t> w, std::span<const int64_t> b, int scale) {
  auto y = e.Linear(ids.forward, x, w);
  for (size_t o = 0; o < y.size(); ++o) y[o] = Truncate(y[o], scale) + b[o];
  return y;
}

LayerGrad FcBackward(Engine& e, const OpIds& ids, int n_in, int n_out, std::span<const int64_t> x,
                     std::span<const int64_t> w, std::span<const int64_t> dy, int scale,
                     bool input_grad) {
  LayerGrad r;
  r.db.assign(dy.begin(), dy.end());
  r.dw = e.Linear(ids.weight_grad, dy, x);
  TruncateInPlace(r.dw, scale);
  if (input_grad) {
    std::vector<int64_t> wt(w.size());
    for (int o = 0; o < n_out; ++o) {
      for (int j = 0; j < n_in; ++j) wt[size_t(j) * n_out + o] = w[size_t(o) * n_in + j];
    }
    r.dx = e.Linear(ids.input_grad, dy, wt);
    TruncateInPlace(r.dx, scale);
  }
  return r;
}

LossResult SoftmaxCrossEntropy(std::span<const int64_t> logits, int label, int scale) {
  if (label < 0 || size_t(label) >= logits.size()) throw ParameterError("label out of range");
  std::vector<double> z(logits.size());
  for (size_t i = 0; i < z.size(); ++i) z[i] = FromFixed(logits[i], scale);
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0;
  for (double& v : z) sum += (v = std::exp(v - mx));
  LossResult r;
  r.grad.resize(z.size());
  for (size_t i = 0; i < z.size(); ++i) {
    const double p = z[i] / sum;
    r.grad[i] = ToFixed(p - (int(i) == label ? 1.0 : 0.0), scale);
  }
  r.loss = -std::log(std::max(z[label] / sum, 1e-300));
  r.predicted = int(std::max_element(logits.begin(), logits.end()) - logits.begin());
  return r;
}

}  // namespace sectrain::train
