#ifndef SECTRAIN_TRAIN_TRAINER_H_
#define SECTRAIN_TRAIN_TRAINER_H_

#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "sectrain/train/data.h"
#include "sectrain/train/engine.h"
#include "sectrain/train/layers.h"
#include "sectrain/train/model.h"
#include "sectrain/transport/endpoint.h"

namespace sectrain::train {

struct TrainConfig {
  int batch = 8;
  // Learning rate at the model's scale; 64 is 2^-6 at scale 12.
  int64_t lr = 64;
};

// Per-layer parameter gradients summed over a batch.
struct GradBundle {
  std::vector<LayerParams> layers;
  std::vector<std::vector<int64_t>> input;  // gradient at the model input, per sample, when computed
};

struct BatchResult {
  double loss = 0;  // mean over the batch
  int correct = 0;
};

struct EpochMetrics {
  int epoch = 0;
  double loss = 0;
  double accuracy = 0;
  double online_seconds = 0;
  double offline_seconds = 0;
  uint64_t bytes_online = 0;
  uint64_t bytes_offline = 0;
  std::vector<double> batch_losses;
};

void WriteMetricsHeader(std::ostream& out);
void WriteMetricsRow(std::ostream& out, const EpochMetrics& m);

// Minibatch SGD over an Engine. All arithmetic outside the engine is done
// here, so two engines with exact semantics give identical models.
class Trainer {
 public:
  // `channel`, when given, supplies the byte counts of the metrics.
  Trainer(Model& model, Engine& engine, TrainConfig config = {},
          const transport::Endpoint* channel = nullptr);

  // Logits per sample.
  std::vector<std::vector<int64_t>> Forward(const std::vector<std::vector<int64_t>>& inputs,
                                            bool keep = true);
  // Gradients of the loss whose logit gradients are `dlogits`.
  GradBundle Backward(const std::vector<std::vector<int64_t>>& dlogits, bool input_grad = false);
  // w -= floor(sum_grad * lr / (batch * 2^scale)). Throws OverflowError if
  // a parameter leaves the bit width.
  void Step(const GradBundle& grads, int batch);

  BatchResult TrainBatch(const Dataset& data, size_t begin, size_t end);
  EpochMetrics TrainEpoch(const Dataset& data, int epoch = 0,
                          const std::function<void(size_t, const BatchResult&)>& progress = {});
  // Mean loss and accuracy without touching the model.
  BatchResult Evaluate(const Dataset& data);

  // Engine calls of each operation id per sample, for offline sizing.
  const std::vector<std::pair<uint32_t, size_t>>& calls_per_sample() const { return calls_; }
  Model& model() { return model_; }

 private:
  struct SampleState {
    std::vector<std::vector<int64_t>> acts;  // acts[i] enters layer i
    std::vector<uint32_t> handles;
  };
  struct BnState {
    std::vector<double> inv_std;
    std::vector<std::vector<int64_t>> xhat;  // per sample
  };

  int first_trainable() const;
  bool NeedsInputGrad(size_t layer) const { return int(layer) > first_trainable(); }
  ConvGeom Geom(size_t layer) const;
  void PrepareOffline(size_t samples);
  std::vector<int64_t> GatherWindows(std::span<const int64_t> x, const ActShape& s, int k) const;
  std::vector<int64_t> ScatterWindows(std::span<const int64_t> g, const ActShape& s, int k) const;

  Model& model_;
  Engine& engine_;
  TrainConfig config_;
  const transport::Endpoint* channel_;
  std::vector<std::pair<uint32_t, size_t>> calls_;
  std::vector<SampleState> states_;
  std::vector<BnState> bn_;
};

}  // namespace sectrain::train

#endif  // SECTRAIN_TRAIN_TRAINER_H_
