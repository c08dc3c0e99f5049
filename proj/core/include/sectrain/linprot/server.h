#ifndef SECTRAIN_LINPROT_SERVER_H_
#define SECTRAIN_LINPROT_SERVER_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>

#include "sectrain/he/evaluator.h"
#include "sectrain/linprot/pool.h"
#include "sectrain/mpc/nonlinear.h"
#include "sectrain/transport/endpoint.h"

namespace sectrain::linprot {

struct ServerConfig {
  uint64_t seed = 2;
  uint64_t dealer_seed = 7;
  int share_bits = 32;
};

// Server side: evaluates on ciphertexts and plays party 0 in the
// nonlinear protocols. Serve() handles requests until the client finishes
// or closes the channel. Pool errors are reported to the client and the
// loop continues; any other error is reported and rethrown.
class ServerSession {
 public:
  ServerSession(transport::Endpoint& channel, std::shared_ptr<const he::Scheme> scheme,
                ServerConfig config = {}, he::OpMeter* meter = nullptr);

  void Serve();

  TriplePool& pool() { return pool_; }
  he::OpMeter* meter() const { return meter_; }
  bool has_keys() const { return eval_.has_value(); }
  // Held comparison state, for tests.
  size_t held_handles() const { return relu_bits_.size() + pool_traces_.size(); }

 private:
  void Handle(uint8_t op, ByteReader& in);
  void OnKeys(ByteReader& in);
  void OnLinearB(ByteReader& in);
  void OnOffline(ByteReader& in);
  void OnOnline(ByteReader& in);
  void OnNonlinear(uint8_t op, ByteReader& in);
  he::Evaluator& eval();
  void SetPhase(Phase p);

  transport::Endpoint& channel_;
  std::shared_ptr<const he::Scheme> scheme_;
  ServerConfig config_;
  he::OpMeter* meter_;
  std::optional<he::Evaluator> eval_;
  TriplePool pool_;
  mpc::Party party_;
  std::map<uint32_t, std::vector<uint8_t>> relu_bits_;
  std::map<uint32_t, mpc::MaxPoolTrace> pool_traces_;
};

}  // namespace sectrain::linprot

#endif  // SECTRAIN_LINPROT_SERVER_H_
