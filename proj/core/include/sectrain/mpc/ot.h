#ifndef SECTRAIN_MPC_OT_H_
#define SECTRAIN_MPC_OT_H_

#include <cstdint>
#include <span>
#include <vector>

#include "sectrain/common/bytes.h"
#include "sectrain/common/phase.h"
#include "sectrain/transport/endpoint.h"

namespace sectrain::mpc {

// OT endpoint backed by dealer-supplied random OTs that are derandomized
// over the channel. Per-instance traffic follows the usual extension costs:
// the receiver sends kappa bits (2-COT) or 2*kappa bits (k-OT), the sender
// sends the masked messages.
//
// Both parties hold the same dealer seed and must issue batches in the same
// order; a mismatch raises ProtocolError on the sender.
class OtEndpoint {
 public:
  static constexpr size_t kCotRequestBytes = 16;
  static constexpr size_t kKotRequestBytes = 32;
  static constexpr size_t kBatchHeaderBytes = 11;

  OtEndpoint(transport::Endpoint& channel, uint64_t dealer_seed,
             Phase phase = Phase::kNonlinear);

  // Correlated OT: the sender supplies x_j and gets a random r_j, the
  // receiver with bit i_j gets r_j + i_j * x_j mod 2^bits.
  std::vector<uint64_t> CotSend(std::span<const uint64_t> correlation, int bits);
  std::vector<uint64_t> CotRecv(std::span<const uint8_t> choice, int bits);

  // 1-out-of-k OT on `bits`-bit messages; `messages` is row-major n x k.
  void KotSend(std::span<const uint64_t> messages, int k, int bits);
  std::vector<uint64_t> KotRecv(std::span<const uint8_t> index, int k, int bits);

  transport::Endpoint& channel() { return channel_; }
  Phase phase() const { return phase_; }
  void set_phase(Phase p) { phase_ = p; }
  uint32_t batches() const { return batch_; }
  uint64_t invocations() const { return invocations_; }

 private:
  enum Kind : uint8_t { kCot = 1, kKot = 2 };

  void CheckHeader(ByteReader& in, Kind kind, size_t n, int k, int bits);

  transport::Endpoint& channel_;
  uint64_t dealer_seed_;
  Phase phase_;
  uint32_t batch_ = 0;
  uint64_t invocations_ = 0;
};

}  // namespace sectrain::mpc

#endif  // SECTRAIN_MPC_OT_H_
