#include "sectrain/train/trainer.h"

#include <cmath>
#include <iomanip>
#include <map>

#include "sectrain/common/errors.h"
#include "sectrain/train/fixed.h"

namespace sectrain::train {

namespace {

int64_t FloorDiv(int64_t a, int64_t d) {
  int64_t q = a / d;
  if (a % d != 0 && ((a < 0) != (d < 0))) --q;
  return q;
}

uint64_t OnlineBytes(const transport::CommReport& r) {
  return r.total_bytes(Phase::kOnline) + r.total_bytes(Phase::kNonlinear);
}

}  // namespace

void WriteMetricsHeader(std::ostream& out) {
  out << "epoch,loss,accuracy,online_seconds,offline_seconds,bytes_online,bytes_offline\n";
}

void WriteMetricsRow(std::ostream& out, const EpochMetrics& m) {
  out << m.epoch << ',' << std::setprecision(8) << m.loss << ',' << m.accuracy << ','
      << m.online_seconds << ',' << m.offline_seconds << ',' << m.bytes_online << ','
      << m.bytes_offline << '\n';
}

Trainer::Trainer(Model& model, Engine& engine, TrainConfig config, const transport::Endpoint* channel)
    : model_(model), engine_(engine), config_(config), channel_(channel) {
  if (config_.batch < 1) throw ParameterError("batch must be positive");
  if (config_.lr < 0) throw ParameterError("learning rate must be non-negative");
  const auto& spec = model_.spec;
  bn_.resize(spec.layers.size());
  for (size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    const OpIds ids = OpIds::ForLayer(uint32_t(i));
    const ActShape in = model_.shapes[i];
    const bool dx = NeedsInputGrad(i);
    std::vector<std::pair<uint32_t, size_t>> c;
    if (l.kind == LayerKind::kConv) {
      DeclareConv(engine_, ids, Geom(i), true);
      c = ConvCalls(ids, Geom(i), dx);
    } else if (l.kind == LayerKind::kFc) {
      DeclareFc(engine_, ids, in.c, l.out, true);
      c = FcCalls(ids, dx);
    } else if (l.kind == LayerKind::kBn) {
      const int size = in.flat() ? 1 : in.h * in.w;
      engine_.Declare(ids.forward, LinearSpec::Scale(in.c, size));
      engine_.Declare(ids.weight_grad, LinearSpec::MatVec(size, 1));
      engine_.Declare(ids.input_grad, LinearSpec::Scale(in.c, size));
      c = {{ids.forward, 1}, {ids.weight_grad, size_t(in.c)}};
      if (dx) c.emplace_back(ids.input_grad, 1);
    }
    calls_.insert(calls_.end(), c.begin(), c.end());
  }
}

int Trainer::first_trainable() const {
  const auto& layers = model_.spec.layers;
  for (size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].kind == LayerKind::kConv || layers[i].kind == LayerKind::kFc ||
        layers[i].kind == LayerKind::kBn) {
      return int(i);
    }
  }
  return int(layers.size());
}

ConvGeom Trainer::Geom(size_t i) const {
  const LayerSpec& l = model_.spec.layers[i];
  const ActShape in = model_.shapes[i];
  return {in.c, l.out, in.h, l.kernel, l.pad, l.stride};
}

void Trainer::PrepareOffline(size_t samples) {
  for (const auto& [id, per] : calls_) engine_.Prepare(id, per * samples);
  engine_.FinishPrepare();
}

std::vector<int64_t> Trainer::GatherWindows(std::span<const int64_t> x, const ActShape& s, int k) const {
  std::vector<int64_t> out;
  out.reserve(x.size());
  for (int c = 0; c < s.c; ++c) {
    for (int u = 0; u < s.h / k; ++u) {
      for (int v = 0; v < s.w / k; ++v) {
        for (int a = 0; a < k; ++a) {
          for (int b = 0; b < k; ++b) out.push_back(x[(size_t(c) * s.h + u * k + a) * s.w + v * k + b]);
        }
      }
    }
  }
  return out;
}

std::vector<int64_t> Trainer::ScatterWindows(std::span<const int64_t> g, const ActShape& s, int k) const {
  std::vector<int64_t> out(s.size());
  size_t n = 0;
  for (int c = 0; c < s.c; ++c) {
    for (int u = 0; u < s.h / k; ++u) {
      for (int v = 0; v < s.w / k; ++v) {
        for (int a = 0; a < k; ++a) {
          for (int b = 0; b < k; ++b) out[(size_t(c) * s.h + u * k + a) * s.w + v * k + b] = g[n++];
        }
      }
    }
  }
  return out;
}

std::vector<std::vector<int64_t>> Trainer::Forward(const std::vector<std::vector<int64_t>>& inputs,
                                                   bool keep) {
  const auto& spec = model_.spec;
  const size_t B = inputs.size();
  const int s = model_.scale;
  states_.assign(B, {});
  std::vector<std::vector<int64_t>> cur = inputs;
  for (auto& x : cur) {
    if (x.size() != model_.shapes[0].size()) throw ParameterError("input does not match the model");
    CheckBits(x, model_.bits, "input");
  }
  for (size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    const ActShape in = model_.shapes[i];
    const OpIds ids = OpIds::ForLayer(uint32_t(i));
    const LayerParams& p = model_.params[i];
    const bool hold = keep && int(i) > first_trainable();
    engine_.set_context(int(i), false);
    if (keep) {
      for (size_t b = 0; b < B; ++b) states_[b].acts.push_back(cur[b]);
    }
    if (l.kind == LayerKind::kBn) {
      const int C = in.c;
      const size_t S = in.flat() ? 1 : size_t(in.h) * in.w;
      BnState& st = bn_[i];
      st.inv_std.assign(C, 0);
      st.xhat.assign(B, std::vector<int64_t>(in.size()));
      for (int c = 0; c < C; ++c) {
        double sum = 0, sq = 0;
        for (size_t b = 0; b < B; ++b) {
          for (size_t j = 0; j < S; ++j) sum += FromFixed(cur[b][c * S + j], s);
        }
        const double n = double(B * S), mean = sum / n;
        for (size_t b = 0; b < B; ++b) {
          for (size_t j = 0; j < S; ++j) {
            const double d = FromFixed(cur[b][c * S + j], s) - mean;
            sq += d * d;
          }
        }
        st.inv_std[c] = 1.0 / std::sqrt(sq / n + 1e-5);
        for (size_t b = 0; b < B; ++b) {
          for (size_t j = 0; j < S; ++j) {
            st.xhat[b][c * S + j] = ToFixed((FromFixed(cur[b][c * S + j], s) - mean) * st.inv_std[c], s);
          }
        }
      }
    }
    for (size_t b = 0; b < B; ++b) {
      std::vector<int64_t>& x = cur[b];
      std::vector<int64_t> y;
      uint32_t handle = 0;
      switch (l.kind) {
        case LayerKind::kConv:
          y = ConvForward(engine_, ids, Geom(i), x, p.w, p.b, s);
          break;
        case LayerKind::kFc:
          y = FcForward(engine_, ids, x, p.w, p.b, s);
          break;
        case LayerKind::kBn: {
          const size_t S = in.flat() ? 1 : size_t(in.h) * in.w;
          y = engine_.Linear(ids.forward, bn_[i].xhat[b], p.w);
          for (size_t j = 0; j < y.size(); ++j) y[j] = Truncate(y[j], s) + p.b[j / S];
          break;
        }
        case LayerKind::kRelu:
          y = engine_.Relu(x, hold ? &handle : nullptr);
          break;
        case LayerKind::kMaxPool:
          y = engine_.MaxPool(GatherWindows(x, in, l.size), l.size * l.size, hold ? &handle : nullptr);
          break;
        case LayerKind::kFlatten:
          y = std::move(x);
          break;
      }
      CheckBits(y, model_.bits, "activation");
      if (keep) states_[b].handles.push_back(handle);
      x = std::move(y);
    }
  }
  return cur;
}

GradBundle Trainer::Backward(const std::vector<std::vector<int64_t>>& dlogits, bool input_grad) {
  const auto& spec = model_.spec;
  const size_t B = dlogits.size();
  if (B != states_.size()) throw ContractError("backward needs a matching forward pass");
  const int s = model_.scale;
  GradBundle out;
  out.layers.resize(spec.layers.size());
  for (size_t i = 0; i < spec.layers.size(); ++i) {
    out.layers[i].w.assign(model_.params[i].w.size(), 0);
    out.layers[i].b.assign(model_.params[i].b.size(), 0);
  }
  std::vector<std::vector<int64_t>> g = dlogits;
  const int stop = input_grad ? 0 : first_trainable();
  for (int i = int(spec.layers.size()) - 1; i >= stop; --i) {
    const LayerSpec& l = spec.layers[i];
    const ActShape in = model_.shapes[i];
    const OpIds ids = OpIds::ForLayer(uint32_t(i));
    const LayerParams& p = model_.params[i];
    const bool dx = input_grad || i > first_trainable();
    LayerParams& acc = out.layers[i];
    engine_.set_context(i, true);
    for (size_t b = 0; b < B; ++b) {
      const std::vector<int64_t>& x = states_[b].acts.at(i);
      const uint32_t handle = states_[b].handles.at(i);
      std::vector<int64_t> next;
      auto add = [&](const LayerGrad& lg) {
        for (size_t k = 0; k < lg.dw.size(); ++k) acc.w[k] += lg.dw[k];
        for (size_t k = 0; k < lg.db.size(); ++k) acc.b[k] += lg.db[k];
        next = lg.dx;
      };
      switch (l.kind) {
        case LayerKind::kConv:
          add(ConvBackward(engine_, ids, Geom(i), x, p.w, g[b], s, dx));
          break;
        case LayerKind::kFc:
          add(FcBackward(engine_, ids, in.c, l.out, x, p.w, g[b], s, dx));
          break;
        case LayerKind::kBn: {
          const size_t S = in.flat() ? 1 : size_t(in.h) * in.w;
          const auto& xhat = bn_[i].xhat[b];
          for (int c = 0; c < in.c; ++c) {
            const std::span<const int64_t> xs(xhat.data() + c * S, S), gs(g[b].data() + c * S, S);
            acc.w[c] += Truncate(engine_.Linear(ids.weight_grad, xs, gs)[0], s);
            for (size_t j = 0; j < S; ++j) acc.b[c] += gs[j];
          }
          if (dx) {
            next = engine_.Linear(ids.input_grad, g[b], p.w);
            for (size_t j = 0; j < next.size(); ++j) {
              next[j] = ToFixed(FromFixed(Truncate(next[j], s), s) * bn_[i].inv_std[j / S], s);
            }
          }
          break;
        }
        case LayerKind::kRelu:
          if (dx) next = engine_.ReluBackward(handle, g[b]);
          break;
        case LayerKind::kMaxPool:
          if (dx) next = ScatterWindows(engine_.MaxPoolBackward(handle, g[b]), in, l.size);
          break;
        case LayerKind::kFlatten:
          next = std::move(g[b]);
          break;
      }
      CheckBits(next, model_.bits, "gradient");
      g[b] = std::move(next);
    }
  }
  for (const auto& lp : out.layers) {
    CheckBits(lp.w, 62, "weight gradient");
    CheckBits(lp.b, 62, "bias gradient");
  }
  if (input_grad) out.input = std::move(g);
  return out;
}

void Trainer::Step(const GradBundle& grads, int batch) {
  if (batch < 1) throw ParameterError("batch must be positive");
  const int64_t denom = int64_t(batch) << model_.scale;
  for (size_t i = 0; i < model_.params.size(); ++i) {
    auto update = [&](std::vector<int64_t>& w, const std::vector<int64_t>& g) {
      for (size_t k = 0; k < w.size(); ++k) {
        const __int128 prod = __int128(g[k]) * config_.lr;
        if (prod > INT64_MAX || prod < INT64_MIN) throw OverflowError("parameter update overflow");
        w[k] -= FloorDiv(int64_t(prod), denom);
      }
      CheckBits(w, model_.bits, "parameter");
    };
    update(model_.params[i].w, grads.layers.at(i).w);
    update(model_.params[i].b, grads.layers.at(i).b);
  }
}

BatchResult Trainer::TrainBatch(const Dataset& data, size_t begin, size_t end) {
  std::vector<std::vector<int64_t>> inputs;
  for (size_t k = begin; k < end; ++k) inputs.push_back(data.Input(k, model_.scale));
  PrepareOffline(inputs.size());
  const auto logits = Forward(inputs, true);
  BatchResult r;
  std::vector<std::vector<int64_t>> dl;
  for (size_t b = 0; b < logits.size(); ++b) {
    const int label = data.labels[begin + b];
    auto lr = SoftmaxCrossEntropy(logits[b], label, model_.scale);
    r.loss += lr.loss;
    r.correct += lr.predicted == label;
    dl.push_back(std::move(lr.grad));
  }
  r.loss /= double(logits.size());
  Step(Backward(dl), int(logits.size()));
  return r;
}

EpochMetrics Trainer::TrainEpoch(const Dataset& data, int epoch,
                                 const std::function<void(size_t, const BatchResult&)>& progress) {
  EpochMetrics m;
  m.epoch = epoch;
  const double on0 = engine_.online_seconds(), off0 = engine_.offline_seconds();
  transport::CommReport r0;
  if (channel_) r0 = channel_->report();
  double loss = 0;
  int correct = 0;
  for (size_t begin = 0; begin < data.size(); begin += config_.batch) {
    const size_t end = std::min(data.size(), begin + config_.batch);
    const BatchResult br = TrainBatch(data, begin, end);
    loss += br.loss * double(end - begin);
    correct += br.correct;
    m.batch_losses.push_back(br.loss);
    if (progress) progress(begin / config_.batch, br);
  }
  m.loss = data.size() ? loss / double(data.size()) : 0;
  m.accuracy = data.size() ? double(correct) / double(data.size()) : 0;
  m.online_seconds = engine_.online_seconds() - on0;
  m.offline_seconds = engine_.offline_seconds() - off0;
  if (channel_) {
    const auto r1 = channel_->report();
    m.bytes_online = OnlineBytes(r1) - OnlineBytes(r0);
    m.bytes_offline = r1.total_bytes(Phase::kOffline) - r0.total_bytes(Phase::kOffline);
  }
  return m;
}

BatchResult Trainer::Evaluate(const Dataset& data) {
  BatchResult r;
  for (size_t begin = 0; begin < data.size(); begin += config_.batch) {
    const size_t end = std::min(data.size(), begin + config_.batch);
    std::vector<std::vector<int64_t>> inputs;
    for (size_t k = begin; k < end; ++k) inputs.push_back(data.Input(k, model_.scale));
    const auto& layers = model_.spec.layers;
    for (const auto& [id, per] : calls_) {
      const size_t layer = id / 8;
      const bool fwd = id % 8 == 0;
      if (fwd && layer < layers.size()) engine_.Prepare(id, per * inputs.size());
    }
    engine_.FinishPrepare();
    const auto logits = Forward(inputs, false);
    for (size_t b = 0; b < logits.size(); ++b) {
      const auto lr = SoftmaxCrossEntropy(logits[b], data.labels[begin + b], model_.scale);
      r.loss += lr.loss;
      r.correct += lr.predicted == data.labels[begin + b];
    }
  }
  if (data.size()) r.loss /= double(data.size());
  return r;
}

}  // namespace sectrain::train
