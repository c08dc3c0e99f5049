#include "sectrain/train/model.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sectrain/common/errors.h"
#include "sectrain/common/prng.h"
#include "sectrain/train/fixed.h"

namespace sectrain::train {

using nlohmann::json;

namespace {

constexpr std::string_view kNames[] = {"conv", "fc", "bn", "relu", "maxpool", "flatten"};

int Positive(const json& j, const char* key, int fallback = 0) {
  const int v = j.value(key, fallback);
  if (v <= 0) throw ParameterError(std::string("layer field '") + key + "' must be positive");
  return v;
}

}  // namespace

std::string_view LayerKindName(LayerKind k) { return kNames[int(k)]; }

LayerKind ParseLayerKind(std::string_view name) {
  for (int i = 0; i < 6; ++i) {
    if (kNames[i] == name) return LayerKind(i);
  }
  throw ParameterError("unknown layer kind: " + std::string(name));
}

std::vector<ActShape> ModelSpec::Shapes() const {
  if (input.c <= 0 || input.h <= 0 || input.w <= 0) throw ParameterError("input shape must be C x H x W");
  if (classes < 2) throw ParameterError("need at least two classes");
  std::vector<ActShape> out{input};
  for (size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& l = layers[i];
    ActShape s = out.back();
    auto fail = [&](const std::string& what) {
      return ParameterError("layer " + std::to_string(i) + " (" + std::string(LayerKindName(l.kind)) +
                            "): " + what);
    };
    switch (l.kind) {
      case LayerKind::kConv: {
        if (s.flat()) throw fail("needs a spatial input");
        if (s.h != s.w) throw fail("square inputs only");
        if (l.out <= 0 || l.kernel <= 0 || l.stride <= 0) throw fail("bad sizes");
        if (l.pad < 0 || l.pad >= l.kernel) throw fail("pad must be in [0, kernel)");
        const int full = s.h + 2 * l.pad - l.kernel + 1;
        if (full < 1) throw fail("kernel larger than padded input");
        s = {l.out, (full - 1) / l.stride + 1, (full - 1) / l.stride + 1};
        break;
      }
      case LayerKind::kFc:
        if (!s.flat()) throw fail("needs a flat input");
        if (l.out <= 0) throw fail("bad sizes");
        s = {l.out, 0, 0};
        break;
      case LayerKind::kBn:
      case LayerKind::kRelu:
        break;
      case LayerKind::kMaxPool:
        if (s.flat()) throw fail("needs a spatial input");
        if (l.size <= 0 || s.h % l.size || s.w % l.size) throw fail("window must divide the input");
        s = {s.c, s.h / l.size, s.w / l.size};
        break;
      case LayerKind::kFlatten:
        s = {int(s.size()), 0, 0};
        break;
    }
    out.push_back(s);
  }
  if (!(out.back() == ActShape{classes, 0, 0})) throw ParameterError("model must end in a flat vector of class logits");
  return out;
}

std::string ModelSpec::ToJson() const {
  json j;
  j["input"] = {input.c, input.h, input.w};
  j["classes"] = classes;
  j["seed"] = seed;
  j["layers"] = json::array();
  for (const auto& l : layers) {
    json e{{"type", std::string(LayerKindName(l.kind))}};
    switch (l.kind) {
      case LayerKind::kConv:
        e["out"] = l.out;
        e["kernel"] = l.kernel;
        e["pad"] = l.pad;
        e["stride"] = l.stride;
        break;
      case LayerKind::kFc:
        e["out"] = l.out;
        break;
      case LayerKind::kMaxPool:
        e["size"] = l.size;
        break;
      default:
        break;
    }
    j["layers"].push_back(e);
  }
  return j.dump(2);
}

ModelSpec ParseModelSpec(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("model spec: ") + e.what());
  }
  try {
    ModelSpec spec;
    const auto in = j.at("input").get<std::vector<int>>();
    if (in.size() != 3) throw ParameterError("model spec: input must be [C, H, W]");
    spec.input = {in[0], in[1], in[2]};
    spec.classes = j.value("classes", 10);
    spec.seed = j.value("seed", uint64_t(1));
    for (const auto& e : j.at("layers")) {
      LayerSpec l;
      l.kind = ParseLayerKind(e.at("type").get<std::string>());
      if (l.kind == LayerKind::kConv) {
        l.out = Positive(e, "out");
        l.kernel = Positive(e, "kernel");
        l.pad = e.value("pad", 0);
        l.stride = Positive(e, "stride", 1);
      } else if (l.kind == LayerKind::kFc) {
        l.out = Positive(e, "out");
      } else if (l.kind == LayerKind::kMaxPool) {
        l.size = Positive(e, "size", 2);
      }
      spec.layers.push_back(l);
    }
    spec.Shapes();
    return spec;
  } catch (const json::exception& e) {
    throw ParameterError(std::string("model spec: ") + e.what());
  }
}

ModelSpec LoadModelSpec(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParameterError("cannot open model spec " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ParseModelSpec(ss.str());
}

ModelSpec TwoConvSpec(uint64_t seed) {
  ModelSpec s;
  s.seed = seed;
  s.layers = {{LayerKind::kConv, 2, 5, 2, 1, 0}, {LayerKind::kRelu},
              {LayerKind::kMaxPool, 0, 0, 0, 1, 2}, {LayerKind::kConv, 4, 5, 2, 1, 0},
              {LayerKind::kRelu},                   {LayerKind::kMaxPool, 0, 0, 0, 1, 2},
              {LayerKind::kFlatten},                {LayerKind::kFc, 10}};
  return s;
}

ModelSpec LeNet5Spec(uint64_t seed) {
  ModelSpec s;
  s.seed = seed;
  s.layers = {{LayerKind::kConv, 6, 5, 2, 1, 0}, {LayerKind::kRelu},
              {LayerKind::kMaxPool, 0, 0, 0, 1, 2}, {LayerKind::kConv, 16, 5, 0, 1, 0},
              {LayerKind::kRelu},                   {LayerKind::kMaxPool, 0, 0, 0, 1, 2},
              {LayerKind::kFlatten},                {LayerKind::kFc, 120},
              {LayerKind::kRelu},                   {LayerKind::kFc, 84},
              {LayerKind::kRelu},                   {LayerKind::kFc, 10}};
  return s;
}

Model InitModel(const ModelSpec& spec, int scale, int bits) {
  Model m;
  m.spec = spec;
  m.shapes = spec.Shapes();
  m.scale = scale;
  m.bits = bits;
  Prng rng(spec.seed, {0x696e6974});
  for (size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    const ActShape in = m.shapes[i];
    LayerParams p;
    auto fill = [&](size_t n, int fan_in) {
      const double bound = 1.0 / std::sqrt(double(fan_in));
      p.w.resize(n);
      for (auto& v : p.w) v = ToFixed((2 * rng.UnitDouble() - 1) * bound, scale);
    };
    if (l.kind == LayerKind::kConv) {
      fill(size_t(l.out) * in.c * l.kernel * l.kernel, in.c * l.kernel * l.kernel);
      p.b.assign(l.out, 0);
    } else if (l.kind == LayerKind::kFc) {
      fill(size_t(l.out) * in.c, in.c);
      p.b.assign(l.out, 0);
    } else if (l.kind == LayerKind::kBn) {
      p.w.assign(in.c, int64_t(1) << scale);
      p.b.assign(in.c, 0);
    }
    m.params.push_back(std::move(p));
  }
  return m;
}

}  // namespace sectrain::train
