#ifndef SECTRAIN_LINPROT_SESSION_H_
#define SECTRAIN_LINPROT_SESSION_H_

#include <exception>
#include <memory>
#include <optional>
#include <thread>

#include "sectrain/he/keys.h"
#include "sectrain/he/meter.h"
#include "sectrain/he/params.h"
#include "sectrain/he/scheme.h"
#include "sectrain/linprot/client.h"
#include "sectrain/linprot/server.h"
#include "sectrain/transport/memory_channel.h"

namespace sectrain::linprot {

struct SessionConfig {
  he::Backend backend = he::Backend::kRlwe;
  uint32_t degree = 4096;
  uint64_t seed = 1;
  uint64_t dealer_seed = 7;
  int share_bits = 32;
  // Real-time link delay on the in-process channel.
  std::optional<transport::LinkModel> link;
};

// Client and server over an in-process channel, the server running its
// request loop on its own thread. Keys are sent on construction.
class LocalSession {
 public:
  explicit LocalSession(const SessionConfig& config);
  LocalSession(const SessionConfig& config, const he::HeParams& params);
  ~LocalSession();
  LocalSession(const LocalSession&) = delete;
  LocalSession& operator=(const LocalSession&) = delete;

  // Ends the server loop; rethrows a server-side failure.
  void Stop();

  Client& client() { return *client_; }
  ServerSession& server() { return *server_; }
  transport::Endpoint& client_channel() { return *pair_.client; }
  transport::Endpoint& server_channel() { return *pair_.server; }
  he::OpMeter& client_meter() { return client_meter_; }
  he::OpMeter& server_meter() { return server_meter_; }
  const he::Scheme& scheme() const { return *scheme_; }
  std::shared_ptr<const he::Scheme> scheme_ptr() const { return scheme_; }
  const he::KeySet& keys() const { return keys_; }

 private:
  std::shared_ptr<const he::Scheme> scheme_;
  he::KeySet keys_;
  transport::EndpointPair pair_;
  he::OpMeter client_meter_;
  he::OpMeter server_meter_;
  std::unique_ptr<ServerSession> server_;
  std::unique_ptr<Client> client_;
  std::thread thread_;
  std::exception_ptr error_;
};

}  // namespace sectrain::linprot

#endif  // SECTRAIN_LINPROT_SESSION_H_
