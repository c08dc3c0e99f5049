#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "sectrain/common/errors.h"
#include "sectrain/common/prng.h"
#include "sectrain/he/params.h"
#include "sectrain/linprot/session.h"
#include "sectrain/train/data.h"
#include "sectrain/train/engine.h"
#include "sectrain/train/fixed.h"
#include "sectrain/train/layers.h"
#include "sectrain/train/model.h"
#include "sectrain/train/trainer.h"

namespace sectrain::train {
namespace {

constexpr int kScale = 12;

uint64_t PlainModulus() { return he::HeParams::Default(4096).plain_modulus(); }

std::vector<int64_t> RandomFixed(Prng& rng, size_t n, double bound) {
  std::vector<int64_t> v(n);
  for (auto& e : v) e = ToFixed((2 * rng.UnitDouble() - 1) * bound, kScale);
  return v;
}

ModelSpec Spec(const std::string& json) { return ParseModelSpec(json); }

TEST(Fixed, QuantizeAndRange) {
  EXPECT_EQ(ToFixed(1.0, 12), 4096);
  EXPECT_EQ(ToFixed(-0.5, 12), -2048);
  EXPECT_EQ(ToFixed(1.0 / 8192, 12), 1);  // half rounds away from zero
  EXPECT_EQ(Truncate(-1, 3), -1);
  EXPECT_EQ(Truncate(-8, 3), -1);
  EXPECT_EQ(Truncate(7, 3), 0);
  const std::vector<double> v{0.25, -2.0};
  const FixTensor t = FixTensor::Quantize({2}, v, 12, 32);
  EXPECT_EQ(t.data, (std::vector<int64_t>{1024, -8192}));
  EXPECT_DOUBLE_EQ(t.ToDouble(1), -2.0);
  EXPECT_THROW(FixTensor::Quantize({1}, std::vector<double>{1 << 20}, 12, 32), OverflowError);
  EXPECT_THROW(FixTensor({2}, {1}, 12, 32), ParameterError);
  EXPECT_THROW(CheckBits(std::vector<int64_t>{int64_t(1) << 31}, 32, "x"), OverflowError);
}

TEST(ModelSpec, JsonRoundTripAndShapes) {
  const ModelSpec two = TwoConvSpec(5);
  const ModelSpec back = ParseModelSpec(two.ToJson());
  EXPECT_EQ(back.ToJson(), two.ToJson());
  EXPECT_EQ(back.seed, 5u);
  const auto shapes = two.Shapes();
  EXPECT_EQ(shapes[3], (ActShape{2, 14, 14}));
  EXPECT_EQ(shapes[4], (ActShape{4, 14, 14}));
  EXPECT_EQ(shapes[7], (ActShape{196, 0, 0}));
  const auto lenet = LeNet5Spec().Shapes();
  EXPECT_EQ(lenet[4], (ActShape{16, 10, 10}));
  EXPECT_EQ(lenet[7], (ActShape{400, 0, 0}));
  EXPECT_EQ(lenet.back(), (ActShape{10, 0, 0}));
}

TEST(ModelSpec, RejectsInconsistentChains) {
  EXPECT_THROW(Spec(R"({"input":[1,8,8],"classes":2,"layers":[{"type":"fc","out":2}]})"), ParameterError);
  EXPECT_THROW(Spec(R"({"input":[1,8,8],"classes":2,"layers":[{"type":"flatten"}]})"), ParameterError);
  EXPECT_THROW(Spec(R"({"input":[1,6,6],"classes":2,"layers":[{"type":"maxpool","size":4}]})"), ParameterError);
  EXPECT_THROW(Spec(R"({"input":[1,8,8],"layers":[{"type":"pool"}]})"), ParameterError);
  EXPECT_THROW(Spec(R"({"input":[1,8,8],"classes":2,"layers":[{"type":"conv","out":1,"kernel":3,"pad":3}]})"),
               ParameterError);
  EXPECT_THROW(Spec("not json"), ParameterError);
  EXPECT_NO_THROW(Spec(R"({"input":[1,8,8],"classes":2,"layers":[{"type":"flatten"},{"type":"fc","out":2}]})"));
}

TEST(Layers, ZeroWeightsGiveZeroPreActivations) {
  PlainEngine e(PlainModulus());
  Prng rng(1);
  const ConvGeom g{2, 3, 6, 3, 1, 1};
  const OpIds ids;
  DeclareConv(e, ids, g, true);
  const auto x = RandomFixed(rng, 72, 1.0);
  const auto y = ConvForward(e, ids, g, x, std::vector<int64_t>(54), std::vector<int64_t>(3), kScale);
  EXPECT_EQ(y, std::vector<int64_t>(108));
}

TEST(Layers, IdentityKernelKeepsInputs) {
  PlainEngine e(PlainModulus());
  Prng rng(2);
  const ConvGeom g{1, 1, 7, 1, 0, 1};
  DeclareConv(e, {}, g, true);
  const auto x = RandomFixed(rng, 49, 3.0);
  EXPECT_EQ(ConvForward(e, {}, g, x, std::vector<int64_t>{1 << kScale}, std::vector<int64_t>{0}, kScale), x);
}

TEST(Layers, ZeroOutputGradientGivesZeroGradients) {
  PlainEngine e(PlainModulus());
  Prng rng(3);
  const ConvGeom g{2, 2, 5, 3, 1, 1};
  DeclareConv(e, {}, g, true);
  const auto x = RandomFixed(rng, 50, 1.0), w = RandomFixed(rng, 36, 1.0);
  const auto r = ConvBackward(e, {}, g, x, w, std::vector<int64_t>(50), kScale, true);
  EXPECT_EQ(r.dw, std::vector<int64_t>(36));
  EXPECT_EQ(r.db, std::vector<int64_t>(2));
  EXPECT_EQ(r.dx, std::vector<int64_t>(50));
}

TEST(Layers, OneByOneWeightGradient) {
  PlainEngine e(PlainModulus());
  const ConvGeom g{1, 1, 2, 1, 0, 1};
  DeclareConv(e, {}, g, true);
  const std::vector<int64_t> x{4096, 2048, -4096, 8192}, dy{1024, 4096, 2048, -512};
  // (1*0.25 + 0.5*1 - 1*0.5 + 2*-0.125) = 0
  EXPECT_EQ(ConvBackward(e, {}, g, x, std::vector<int64_t>{7}, dy, kScale, false).dw[0], 0);
  const std::vector<int64_t> dy2{4096, 4096, 0, 4096};
  // 1 + 0.5 + 2 = 3.5
  EXPECT_EQ(ConvBackward(e, {}, g, x, std::vector<int64_t>{7}, dy2, kScale, false).dw[0], 14336);
}

// Raw (unscaled) probe loss sum_k y_raw[k] * dy[k], in real units.
double Probe(Engine& e, uint32_t id, std::span<const int64_t> x, std::span<const int64_t> w,
             std::span<const int64_t> dy) {
  const auto y = e.Linear(id, x, w);
  __int128 acc = 0;
  for (size_t k = 0; k < y.size(); ++k) acc += __int128(y[k]) * dy[k];
  return std::ldexp(double(acc), -3 * kScale);
}

TEST(Layers, GradientsMatchFiniteDifferences) {
  for (int stride : {1, 2}) {
    PlainEngine e(PlainModulus());
    Prng rng(4 + stride);
    const ConvGeom g{2, 3, 8, 3, 1, stride};
    DeclareConv(e, {}, g, true);
    const auto x = RandomFixed(rng, 128, 1.0), w = RandomFixed(rng, 54, 1.0);
    const size_t f = size_t(g.full());
    // Output gradient on the stride-1 output, zero where the stride skips.
    std::vector<int64_t> dfull(3 * f * f), dy;
    for (int o = 0; o < 3; ++o) {
      for (int u = 0; u < g.out(); ++u) {
        for (int v = 0; v < g.out(); ++v) {
          dy.push_back(ToFixed(2 * rng.UnitDouble() - 1, kScale));
          dfull[(o * f + u * stride) * f + v * stride] = dy.back();
        }
      }
    }
    const auto r = ConvBackward(e, {}, g, x, w, dy, kScale, true);
    const double ulp = std::ldexp(1.0, -kScale);
    for (size_t j = 0; j < w.size(); ++j) {
      auto wp = w, wm = w;
      ++wp[j];
      --wm[j];
      const double fd = (Probe(e, 0, x, wp, dfull) - Probe(e, 0, x, wm, dfull)) / (2 * ulp);
      EXPECT_LE(std::fabs(fd - FromFixed(r.dw[j], kScale)), 2 * ulp) << j;
    }
    for (size_t j = 0; j < x.size(); ++j) {
      auto xp = x, xm = x;
      ++xp[j];
      --xm[j];
      const double fd = (Probe(e, 0, xp, w, dfull) - Probe(e, 0, xm, w, dfull)) / (2 * ulp);
      EXPECT_LE(std::fabs(fd - FromFixed(r.dx[j], kScale)), 2 * ulp) << j;
    }
  }
}

TEST(Layers, FloatReferenceGradients) {
  PlainEngine e(PlainModulus());
  Prng rng(7);
  const int H = 8, k = 3, pad = 1;
  const ConvGeom g{1, 1, H, k, pad, 1};
  DeclareConv(e, {}, g, true);
  const auto x = RandomFixed(rng, 64, 1.0), w = RandomFixed(rng, 9, 1.0), dy = RandomFixed(rng, 64, 1.0);
  const auto r = ConvBackward(e, {}, g, x, w, dy, kScale, true);
  auto X = [&](int i, int j) { return i < 0 || j < 0 || i >= H || j >= H ? 0.0 : FromFixed(x[i * H + j], kScale); };
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      double want = 0;
      for (int u = 0; u < H; ++u) {
        for (int v = 0; v < H; ++v) want += X(u - pad + a, v - pad + b) * FromFixed(dy[u * H + v], kScale);
      }
      EXPECT_LE(std::fabs(FromFixed(r.dw[a * k + b], kScale) - want), std::ldexp(1.0, -kScale));
    }
  }
  for (int i = 0; i < H; ++i) {
    for (int j = 0; j < H; ++j) {
      double want = 0;
      for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
          const int u = i + pad - a, v = j + pad - b;
          if (u >= 0 && v >= 0 && u < H && v < H) want += FromFixed(w[a * k + b], kScale) * FromFixed(dy[u * H + v], kScale);
        }
      }
      EXPECT_LE(std::fabs(FromFixed(r.dx[i * H + j], kScale) - want), std::ldexp(1.0, -kScale));
    }
  }
}

TEST(Layers, SoftmaxCrossEntropy) {
  const std::vector<int64_t> logits{0, 0};
  const auto r = SoftmaxCrossEntropy(logits, 1, kScale);
  EXPECT_NEAR(r.loss, std::log(2.0), 1e-12);
  EXPECT_EQ(r.grad, (std::vector<int64_t>{2048, -2048}));
  EXPECT_EQ(r.predicted, 0);
  EXPECT_THROW(SoftmaxCrossEntropy(logits, 2, kScale), ParameterError);
}

ModelSpec TinyFc() {
  return Spec(R"({"input":[1,1,1],"classes":2,"seed":1,"layers":[{"type":"flatten"},{"type":"fc","out":2}]})");
}

TEST(Trainer, HandComputedUpdate) {
  Model m = InitModel(TinyFc());
  m.params[1].w = {1024, -2048};  // 0.25, -0.5
  m.params[1].b = {0, 0};
  PlainEngine e(PlainModulus());
  Trainer t(m, e, {1, 64});
  Dataset d{1, 1, 2, {128}, {0}};  // pixel 128/255
  const int64_t x = ToFixed(128 / 255.0, kScale);
  ASSERT_EQ(x, 2056);
  const int64_t z0 = (x * 1024) >> 12, z1 = (x * -2048) >> 12;
  ASSERT_EQ(z0, 514);
  ASSERT_EQ(z1, -1028);
  // p0 = sigmoid(z0 - z1)
  const double p0 = 1 / (1 + std::exp(-(z0 - z1) / 4096.0));
  const int64_t g0 = std::llround((p0 - 1) * 4096), g1 = -g0;
  ASSERT_EQ(g0, -1667);
  const int64_t dw0 = (g0 * x) >> 12, dw1 = (g1 * x) >> 12;
  auto step = [](int64_t g) {  // floor(g * 64 / 4096)
    return int64_t(std::floor(double(g) * 64 / 4096));
  };
  t.TrainBatch(d, 0, 1);
  EXPECT_EQ(m.params[1].w, (std::vector<int64_t>{1024 - step(dw0), -2048 - step(dw1)}));
  EXPECT_EQ(m.params[1].b, (std::vector<int64_t>{-step(g0), -step(g1)}));
  EXPECT_EQ(m.params[1].w, (std::vector<int64_t>{1038, -2061}));
}

TEST(Trainer, ZeroLearningRateLeavesModel) {
  const Model init = InitModel(TwoConvSpec(3));
  Model m = init;
  PlainEngine e(PlainModulus());
  Trainer t(m, e, {4, 0});
  const Dataset d = SyntheticDataset(8, 28, 28, 10, 1);
  t.TrainEpoch(d);
  EXPECT_EQ(m, init);
}

TEST(Trainer, LossDecreasesOnSyntheticData) {
  ModelSpec spec = Spec(R"({"input":[1,12,12],"classes":3,"seed":2,"layers":[
    {"type":"conv","out":2,"kernel":3,"pad":1},{"type":"relu"},{"type":"maxpool","size":2},
    {"type":"flatten"},{"type":"fc","out":3}]})");
  Model m = InitModel(spec);
  PlainEngine e(PlainModulus());
  Trainer t(m, e, {4, 256});
  const Dataset d = SyntheticDataset(96, 12, 12, 3, 5);
  const double before = t.Evaluate(d).loss;
  for (int ep = 0; ep < 3; ++ep) t.TrainEpoch(d, ep);
  const auto after = t.Evaluate(d);
  EXPECT_LT(after.loss, before);
  EXPECT_GT(after.correct, 60);
}

TEST(Trainer, OverflowIsReported) {
  Model m = InitModel(TinyFc());
  m.params[1].w = {int64_t(1) << 30, 0};
  PlainEngine e(PlainModulus());
  Trainer t(m, e, {1, 64});
  Dataset d{1, 1, 2, {255}, {0}};
  EXPECT_THROW(t.TrainBatch(d, 0, 1), OverflowError);
}

TEST(Trainer, InputGradientsOfWholeNet) {
  Model m = InitModel(TwoConvSpec(4));
  PlainEngine e(PlainModulus());
  Trainer t(m, e, {2, 64});
  const Dataset d = SyntheticDataset(2, 28, 28, 10, 3);
  const auto logits = t.Forward({d.Input(0, kScale), d.Input(1, kScale)});
  std::vector<std::vector<int64_t>> zero(2, std::vector<int64_t>(10));
  const auto g = t.Backward(zero, true);
  for (const auto& lp : g.layers) {
    for (int64_t v : lp.w) ASSERT_EQ(v, 0);
  }
  ASSERT_EQ(g.input.size(), 2u);
  EXPECT_EQ(g.input[0], std::vector<int64_t>(784));
}

struct SecureRun {
  Model model;
  uint64_t online_ccmul = 0;
  uint64_t baseline_convs = 0;
  uint64_t correlated_convs = 0;
};

SecureRun TrainSecure(const ModelSpec& spec, const Dataset& d, he::Backend backend,
                      linprot::Protocol protocol, TrainConfig cfg) {
  linprot::LocalSession s({backend});
  SecureRun r{InitModel(spec)};
  SecureEngine e(s.client(), protocol);
  Trainer t(r.model, e, cfg, &s.client_channel());
  t.TrainEpoch(d);
  s.Stop();
  r.online_ccmul = s.server_meter().count(he::OpKind::kCcMul, Phase::kOnline);
  r.baseline_convs = e.conv_calls(packing::Layout::kBaseline);
  r.correlated_convs = e.conv_calls(packing::Layout::kCorrelated);
  return r;
}

TEST(Trainer, SecureMatchesReferenceOnEightSamples) {
  const ModelSpec spec = TwoConvSpec(9);
  const Dataset d = SyntheticDataset(8, 28, 28, 10, 9);
  Model ref = InitModel(spec);
  PlainEngine pe(PlainModulus());
  Trainer(ref, pe, {4, 64}).TrainEpoch(d);
  ASSERT_FALSE(ref == InitModel(spec));

  const auto pre = TrainSecure(spec, d, he::Backend::kRlwe, linprot::Protocol::kPrecompute, {4, 64});
  EXPECT_TRUE(pre.model == ref);
  EXPECT_EQ(pre.online_ccmul, 0u);
  EXPECT_EQ(pre.baseline_convs, 0u);
  EXPECT_GT(pre.correlated_convs, 0u);

  const auto direct = TrainSecure(spec, d, he::Backend::kTransparent, linprot::Protocol::kDirect, {4, 64});
  EXPECT_TRUE(direct.model == ref);
  EXPECT_GT(direct.online_ccmul, 0u);
}

TEST(Trainer, SecureMatchesReferenceWithBatchNormAndStride) {
  const ModelSpec spec = Spec(R"({"input":[1,12,12],"classes":3,"seed":4,"layers":[
    {"type":"conv","out":2,"kernel":3,"pad":1,"stride":2},{"type":"bn"},{"type":"relu"},
    {"type":"flatten"},{"type":"fc","out":5},{"type":"bn"},{"type":"relu"},{"type":"fc","out":3}]})");
  const Dataset d = SyntheticDataset(8, 12, 12, 3, 4);
  Model ref = InitModel(spec);
  PlainEngine pe(PlainModulus());
  Trainer(ref, pe, {4, 128}).TrainEpoch(d);
  ASSERT_FALSE(ref == InitModel(spec));
  const auto sec = TrainSecure(spec, d, he::Backend::kTransparent, linprot::Protocol::kPrecompute, {4, 128});
  EXPECT_TRUE(sec.model == ref);
  EXPECT_EQ(sec.online_ccmul, 0u);
}

TEST(Data, LoadsIdxSubset) {
  const std::string dir = SECTRAIN_DATA_DIR;
  const Dataset d = LoadIdx(dir + "/mnist1k-images-idx3-ubyte", dir + "/mnist1k-labels-idx1-ubyte", 20);
  EXPECT_EQ(d.size(), 20u);
  EXPECT_EQ(d.rows, 28);
  EXPECT_EQ(d.cols, 28);
  EXPECT_EQ(d.pixels.size(), 20u * 784);
  const Dataset full = LoadIdx(dir + "/mnist1k-images-idx3-ubyte", dir + "/mnist1k-labels-idx1-ubyte");
  EXPECT_EQ(full.size(), 1000u);
  EXPECT_THROW(LoadIdx(dir + "/mnist1k-labels-idx1-ubyte", dir + "/mnist1k-labels-idx1-ubyte"),
               SerializationError);
  EXPECT_THROW(LoadIdx(dir + "/missing", dir + "/missing"), ParameterError);
}

TEST(Data, SyntheticIsDeterministic) {
  const Dataset a = SyntheticDataset(10, 6, 6, 3, 1), b = SyntheticDataset(10, 6, 6, 3, 1);
  EXPECT_EQ(a.pixels, b.pixels);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_NE(a.pixels, SyntheticDataset(10, 6, 6, 3, 2).pixels);
}

TEST(Metrics, CsvLayout) {
  std::ostringstream out;
  WriteMetricsHeader(out);
  WriteMetricsRow(out, EpochMetrics{1, 0.5, 0.25, 1.5, 2.5, 100, 200, {}});
  EXPECT_EQ(out.str(),
            "epoch,loss,accuracy,online_seconds,offline_seconds,bytes_online,bytes_offline\n"
            "1,0.5,0.25,1.5,2.5,100,200\n");
}

}  // namespace
}  // namespace sectrain::train
