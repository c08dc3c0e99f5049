#ifndef SECTRAIN_MPC_NONLINEAR_H_
#define SECTRAIN_MPC_NONLINEAR_H_

#include <cstdint>
#include <span>
#include <vector>

#include "sectrain/common/prng.h"
#include "sectrain/mpc/ot.h"

namespace sectrain::mpc {

// Party 0 plays the server, party 1 the client. Both sides run the same
// sequence of calls on their own thread.
class Party {
 public:
  Party(int id, transport::Endpoint& channel, uint64_t dealer_seed, uint64_t local_seed,
        int bits = 32);

  int id() const { return id_; }
  int bits() const { return bits_; }
  uint64_t mask() const;
  transport::Endpoint& channel() { return ot_.channel(); }
  OtEndpoint& ot() { return ot_; }
  Prng& rng() { return rng_; }
  Phase phase() const { return ot_.phase(); }
  void set_phase(Phase p) { ot_.set_phase(p); }

  // Party 0 sends first; returns the peer's message.
  Bytes Exchange(std::span<const uint8_t> mine);

 private:
  int id_;
  int bits_;
  OtEndpoint ot_;
  Prng rng_;
};

// XOR shares of random bits a, b with c = a & b.
struct BitTriples {
  std::vector<uint8_t> a, b, c;
};

BitTriples MakeBitTriples(Party& party, size_t n);

// XOR shares of x & y, consuming triples [offset, offset + n).
std::vector<uint8_t> And(Party& party, std::span<const uint8_t> x, std::span<const uint8_t> y,
                         const BitTriples& triples, size_t offset);

// XOR shares of 1{a < b} where party 0 inputs a and party 1 inputs b,
// both `input_bits` wide.
std::vector<uint8_t> Millionaire(Party& party, std::span<const uint64_t> input, int input_bits);

// XOR shares of 1{x >= 0} for additively shared x.
std::vector<uint8_t> DRelu(Party& party, std::span<const uint64_t> x);

// Additive shares of d * x for XOR-shared bits d.
std::vector<uint64_t> Mux(Party& party, std::span<const uint8_t> d, std::span<const uint64_t> x);

// Additive shares of max(x, 0); the DReLU bits are kept in `drelu` when set.
std::vector<uint64_t> Relu(Party& party, std::span<const uint64_t> x,
                           std::vector<uint8_t>* drelu = nullptr);

// Comparison bits of a max-pool tournament, per level.
struct MaxPoolTrace {
  int window = 0;
  size_t count = 0;
  std::vector<std::vector<uint8_t>> levels;
};

// `x` holds `x.size() / window` windows back to back; returns one share
// per window. max(a, b) = b + relu(a - b), evaluated as a tournament.
std::vector<uint64_t> MaxPool(Party& party, std::span<const uint64_t> x, int window,
                              MaxPoolTrace* trace = nullptr);
// Routes per-window gradients to the winning positions.
std::vector<uint64_t> MaxPoolBackward(Party& party, const MaxPoolTrace& trace,
                                      std::span<const uint64_t> grad);

// Chunk width of the comparison.
inline constexpr int kMillionaireChunkBits = 4;

}  // namespace sectrain::mpc

#endif  // SECTRAIN_MPC_NONLINEAR_H_
