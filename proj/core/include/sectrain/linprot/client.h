#ifndef SECTRAIN_LINPROT_CLIENT_H_
#define SECTRAIN_LINPROT_CLIENT_H_

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "sectrain/he/evaluator.h"
#include "sectrain/linprot/job.h"
#include "sectrain/linprot/pool.h"
#include "sectrain/mpc/nonlinear.h"
#include "sectrain/transport/endpoint.h"

namespace sectrain::linprot {

// Direct runs every product as a CCMul; precompute moves the CCMuls
// to the offline phase.
enum class Protocol : uint8_t { kDirect, kPrecompute };
std::string_view ProtocolName(Protocol p);
// Accepts "b", "direct", "precompute".
Protocol ParseProtocol(std::string_view name);

struct ClientConfig {
  uint64_t seed = 1;
  uint64_t dealer_seed = 7;
  int share_bits = 32;
};

// Client side: holds the secret key and the plaintext operands.
class Client {
 public:
  Client(transport::Endpoint& channel, std::shared_ptr<const he::Scheme> scheme, he::KeySet keys,
         ClientConfig config = {}, he::OpMeter* meter = nullptr);

  // Sends the public and relinearization keys.
  void Setup();
  // Ends the server's request loop.
  void Finish();

  std::vector<ring::RingElem> LinearB(const LinearJob& job);

  // Samples `count` masks for the layer and has the server precompute
  // their products. count == 0 sends nothing.
  void Offline(uint32_t layer, const JobShape& shape, size_t count);
  // Same with caller-chosen masks (left and right lists per mask).
  void Offline(uint32_t layer, const JobShape& shape,
               std::vector<std::pair<std::vector<ring::RingElem>, std::vector<ring::RingElem>>> masks);
  // Waits until the server has processed every offline request sent so far.
  void SyncOffline();
  // Consumes the layer's oldest mask. Throws PrecomputeMissing when the
  // pool is empty and SingleUseViolation if the server reports reuse.
  std::vector<ring::RingElem> PrecomputeOnline(uint32_t layer, const LinearJob& job);
  // Online step with an explicit mask, bypassing the local store's order.
  std::vector<ring::RingElem> PrecomputeOnline(const ClientMask& mask, const LinearJob& job);

  std::vector<ring::RingElem> Run(Protocol protocol, uint32_t layer, const LinearJob& job);

  // Nonlinear layers on plaintext values that fit `share_bits` signed bits.
  // When `handle` is set the comparison bits are kept for the backward call.
  std::vector<int64_t> Relu(std::span<const int64_t> x, uint32_t* handle = nullptr);
  std::vector<int64_t> ReluBackward(uint32_t handle, std::span<const int64_t> grad);
  std::vector<int64_t> MaxPool(std::span<const int64_t> x, int window, uint32_t* handle = nullptr);
  std::vector<int64_t> MaxPoolBackward(uint32_t handle, std::span<const int64_t> grad);

  he::Evaluator& evaluator() { return eval_; }
  ClientMaskStore& masks() { return masks_; }
  transport::Endpoint& channel() { return channel_; }
  he::OpMeter* meter() const { return meter_; }
  const ClientConfig& config() const { return config_; }

 private:
  void SetPhase(Phase p);
  Bytes Recv(Phase p);
  std::vector<uint64_t> ShareOut(std::span<const int64_t> x, uint8_t op, uint32_t handle,
                                 const std::vector<uint32_t>& extra);
  std::vector<int64_t> Open(std::span<const uint64_t> mine);

  transport::Endpoint& channel_;
  std::shared_ptr<const he::Scheme> scheme_;
  ClientConfig config_;
  he::OpMeter* meter_;
  he::Evaluator eval_;
  Prng rng_;
  ClientMaskStore masks_;
  mpc::Party party_;
  uint32_t next_handle_ = 0;
  std::map<uint32_t, std::vector<uint8_t>> relu_bits_;
  std::map<uint32_t, mpc::MaxPoolTrace> pool_traces_;
};

}  // namespace sectrain::linprot

#endif  // SECTRAIN_LINPROT_CLIENT_H_
