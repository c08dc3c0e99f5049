#ifndef SECTRAIN_TRAIN_MODEL_H_
#define SECTRAIN_TRAIN_MODEL_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sectrain::train {

enum class LayerKind : uint8_t { kConv, kFc, kBn, kRelu, kMaxPool, kFlatten };
std::string_view LayerKindName(LayerKind k);
LayerKind ParseLayerKind(std::string_view name);

// One layer as written in a model spec. Unused fields stay zero.
struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  int out = 0;     // conv output channels, fc outputs
  int kernel = 0;  // conv kernel side
  int pad = 0;
  int stride = 1;  // conv stride, pooling window and stride
  int size = 0;    // maxpool window side
};

// Shape of the activation entering or leaving a layer: C x H x W, or a flat
// vector of length C when H = W = 0.
struct ActShape {
  int c = 0;
  int h = 0;
  int w = 0;

  bool flat() const { return h == 0; }
  size_t size() const { return flat() ? size_t(c) : size_t(c) * h * w; }
  friend bool operator==(const ActShape&, const ActShape&) = default;
};

struct ModelSpec {
  ActShape input{1, 28, 28};
  int classes = 10;
  uint64_t seed = 1;
  std::vector<LayerSpec> layers;

  // Shape after each layer; throws ParameterError if the chain is
  // inconsistent or the last layer does not produce `classes` logits.
  std::vector<ActShape> Shapes() const;
  std::string ToJson() const;
};

ModelSpec ParseModelSpec(std::string_view json);
ModelSpec LoadModelSpec(const std::string& path);

// conv(1->2, 5x5, pad 2), relu, maxpool 2, conv(2->4, 5x5, pad 2), relu,
// maxpool 2, flatten, fc(196->10).
ModelSpec TwoConvSpec(uint64_t seed = 1);
// LeNet-5 on 28x28 inputs.
ModelSpec LeNet5Spec(uint64_t seed = 1);

// Trainable parameters of one layer, at the model's scale. Conv weights are
// out x in x k x k, fc weights out x in.
struct LayerParams {
  std::vector<int64_t> w;
  std::vector<int64_t> b;
  friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

struct Model {
  ModelSpec spec;
  std::vector<ActShape> shapes;  // shapes[i] enters layer i; back() is the output
  std::vector<LayerParams> params;
  int scale = 12;
  int bits = 32;

  friend bool operator==(const Model& a, const Model& b) { return a.params == b.params; }
};

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights quantized to `scale`,
// zero biases, batch-norm gamma 1 and beta 0.
Model InitModel(const ModelSpec& spec, int scale = 12, int bits = 32);

}  // namespace sectrain::train

#endif  // SECTRAIN_TRAIN_MODEL_H_
