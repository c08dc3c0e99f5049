#ifndef SECTRAIN_TRANSPORT_SOCKET_CHANNEL_H_
#define SECTRAIN_TRANSPORT_SOCKET_CHANNEL_H_

#include <cstdint>
#include <memory>
#include <string>

#include "sectrain/transport/endpoint.h"

namespace sectrain::transport {

// Listening TCP socket that hands out one endpoint per accepted peer.
class SocketListener {
 public:
  // Port 0 picks a free port.
  explicit SocketListener(uint16_t port, const std::string& host = "127.0.0.1");
  ~SocketListener();
  SocketListener(const SocketListener&) = delete;
  SocketListener& operator=(const SocketListener&) = delete;

  uint16_t port() const { return port_; }
  std::unique_ptr<Endpoint> Accept();

 private:
  int fd_ = -1;
  uint16_t port_ = 0;
};

// Retries for up to `timeout_ms` while the server is not yet listening.
std::unique_ptr<Endpoint> ConnectSocket(const std::string& host, uint16_t port,
                                        int timeout_ms = 5000);

}  // namespace sectrain::transport

#endif  // SECTRAIN_TRANSPORT_SOCKET_CHANNEL_H_
