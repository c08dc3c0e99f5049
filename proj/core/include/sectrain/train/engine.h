#ifndef SECTRAIN_TRAIN_ENGINE_H_
#define SECTRAIN_TRAIN_ENGINE_H_

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "sectrain/linprot/client.h"
#include "sectrain/linprot/job.h"
#include "sectrain/packing/conv_shape.h"
#include "sectrain/packing/plan.h"
#include "sectrain/transport/endpoint.h"

namespace sectrain::train {

// A linear operation with exact integer semantics:
//  conv:   a is c_in x H x W, b is c_out x c_in x h x h, result c_out x out x out
//  matvec: a has n_in entries, b is n_out x n_in, result n_out
//  outer:  a has n_out entries, b has n_in, result n_out x n_in
//  scale:  a is channels x size, b has channels, result a[c, i] * b[c]
struct LinearSpec {
  enum class Kind : uint8_t { kConv, kMatVec, kOuter, kScale } kind = Kind::kConv;
  int c_in = 1;   // conv input channels, matvec/outer n_in, scale channels
  int c_out = 1;  // conv output channels, matvec/outer n_out, scale size
  packing::ConvShape conv;

  static LinearSpec Conv(int c_in, int c_out, const packing::ConvShape& s) {
    return {Kind::kConv, c_in, c_out, s};
  }
  static LinearSpec MatVec(int n_in, int n_out) { return {Kind::kMatVec, n_in, n_out, {}}; }
  static LinearSpec Outer(int n_in, int n_out) { return {Kind::kOuter, n_in, n_out, {}}; }
  static LinearSpec Scale(int channels, int size) { return {Kind::kScale, channels, size, {}}; }

  size_t result_size() const;
};

// Executes linear and nonlinear operations for the trainer. Results are
// exact integers; the trainer owns all fixed-point rescaling.
class Engine {
 public:
  virtual ~Engine() = default;

  // Registers operation `id` before first use.
  virtual void Declare(uint32_t id, const LinearSpec& spec) = 0;
  // Readies `count` future calls of `id` (the precompute offline phase).
  virtual void Prepare(uint32_t /*id*/, size_t /*count*/) {}
  // Called after a group of Prepare calls.
  virtual void FinishPrepare() {}
  virtual std::vector<int64_t> Linear(uint32_t id, std::span<const int64_t> a,
                                      std::span<const int64_t> b) = 0;

  // With a handle the state for the matching backward call is kept.
  virtual std::vector<int64_t> Relu(std::span<const int64_t> x, uint32_t* handle) = 0;
  virtual std::vector<int64_t> ReluBackward(uint32_t handle, std::span<const int64_t> g) = 0;
  // x holds consecutive windows of `window` entries.
  virtual std::vector<int64_t> MaxPool(std::span<const int64_t> x, int window, uint32_t* handle) = 0;
  virtual std::vector<int64_t> MaxPoolBackward(uint32_t handle, std::span<const int64_t> g) = 0;

  double online_seconds() const { return online_seconds_; }
  double offline_seconds() const { return offline_seconds_; }

  // Online cost attributed to the layer set by set_context.
  struct LayerCost {
    double forward_seconds = 0;
    double backward_seconds = 0;
    uint64_t forward_bytes = 0;
    uint64_t backward_bytes = 0;
  };
  void set_context(int layer, bool backward) {
    layer_ = layer;
    backward_ = backward;
  }
  const std::map<int, LayerCost>& layer_costs() const { return layer_costs_; }

 protected:
  void Charge(double seconds, uint64_t bytes);

  double online_seconds_ = 0;
  double offline_seconds_ = 0;

 private:
  int layer_ = -1;
  bool backward_ = false;
  std::map<int, LayerCost> layer_costs_;
};

// Plaintext reference with the same exact semantics. Linear results whose
// sum of absolute products reaches `modulus / 2` raise OverflowError, as do
// nonlinear inputs outside `share_bits` signed bits.
class PlainEngine : public Engine {
 public:
  explicit PlainEngine(uint64_t modulus, int share_bits = 32);

  void Declare(uint32_t id, const LinearSpec& spec) override;
  std::vector<int64_t> Linear(uint32_t id, std::span<const int64_t> a,
                              std::span<const int64_t> b) override;
  std::vector<int64_t> Relu(std::span<const int64_t> x, uint32_t* handle) override;
  std::vector<int64_t> ReluBackward(uint32_t handle, std::span<const int64_t> g) override;
  std::vector<int64_t> MaxPool(std::span<const int64_t> x, int window, uint32_t* handle) override;
  std::vector<int64_t> MaxPoolBackward(uint32_t handle, std::span<const int64_t> g) override;

 private:
  uint64_t half_;
  int share_bits_;
  std::map<uint32_t, LinearSpec> specs_;
  uint32_t next_handle_ = 0;
  std::map<uint32_t, std::vector<uint8_t>> relu_bits_;
  std::map<uint32_t, std::pair<int, std::vector<uint32_t>>> argmax_;
};

// Runs linear operations through the two-party protocol and nonlinear ones
// through the OT protocols, both over the client's session.
class SecureEngine : public Engine {
 public:
  SecureEngine(linprot::Client& client, linprot::Protocol protocol,
               packing::Layout layout = packing::Layout::kCorrelated);

  void Declare(uint32_t id, const LinearSpec& spec) override;
  void Prepare(uint32_t id, size_t count) override;
  void FinishPrepare() override;
  std::vector<int64_t> Linear(uint32_t id, std::span<const int64_t> a,
                              std::span<const int64_t> b) override;
  std::vector<int64_t> Relu(std::span<const int64_t> x, uint32_t* handle) override;
  std::vector<int64_t> ReluBackward(uint32_t handle, std::span<const int64_t> g) override;
  std::vector<int64_t> MaxPool(std::span<const int64_t> x, int window, uint32_t* handle) override;
  std::vector<int64_t> MaxPoolBackward(uint32_t handle, std::span<const int64_t> g) override;

  linprot::Protocol protocol() const { return protocol_; }
  // Convolutions packed with each layout so far.
  uint64_t conv_calls(packing::Layout l) const { return conv_calls_[int(l)]; }

 private:
  using Op = std::variant<linprot::ConvOp, linprot::MatVecOp, linprot::OuterOp, linprot::ScaleOp>;

  template <typename F>
  std::vector<int64_t> Online(F&& f);

  linprot::Client& client_;
  linprot::Protocol protocol_;
  packing::Layout layout_;
  uint32_t capacity_;
  std::map<uint32_t, Op> ops_;
  uint64_t conv_calls_[2] = {0, 0};
  bool pending_ = false;
};

}  // namespace sectrain::train

#endif  // SECTRAIN_TRAIN_ENGINE_H_
