#include "sectrain/transport/socket_channel.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

#include "sectrain/common/errors.h"

namespace sectrain::transport {

namespace {

std::string Errno(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

class SocketEndpoint final : public Endpoint {
 public:
  explicit SocketEndpoint(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }
  ~SocketEndpoint() override { Close(); }

  void Close() override {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
      fd_ = -1;
    }
  }

 protected:
  void WriteFrame(uint8_t tag, std::span<const uint8_t> payload) override {
    uint8_t header[kFrameHeaderBytes] = {tag};
    const uint32_t n = static_cast<uint32_t>(payload.size());
    for (int i = 0; i < 4; ++i) header[1 + i] = static_cast<uint8_t>(n >> (8 * i));
    WriteAll(header, sizeof(header));
    WriteAll(payload.data(), payload.size());
  }

  bool ReadFrame(uint8_t& tag, Bytes& payload) override {
    uint8_t header[kFrameHeaderBytes];
    if (!ReadAll(header, sizeof(header), true)) return false;
    tag = header[0];
    uint32_t n = 0;
    for (int i = 0; i < 4; ++i) n |= uint32_t(header[1 + i]) << (8 * i);
    payload.resize(n);
    if (!ReadAll(payload.data(), n, false)) throw ChannelClosed("peer closed mid-frame");
    return true;
  }

 private:
  void WriteAll(const uint8_t* p, size_t n) {
    if (fd_ < 0) throw ChannelClosed("socket closed");
    while (n > 0) {
      const ssize_t w = ::send(fd_, p, n, MSG_NOSIGNAL);
      if (w < 0) {
        if (errno == EINTR) continue;
        throw ChannelClosed(Errno("send"));
      }
      p += w;
      n -= size_t(w);
    }
  }

  // False on a clean EOF before the first byte when `eof_ok`.
  bool ReadAll(uint8_t* p, size_t n, bool eof_ok) {
    if (fd_ < 0) return false;
    size_t got = 0;
    while (got < n) {
      const ssize_t r = ::recv(fd_, p + got, n - got, 0);
      if (r < 0) {
        if (errno == EINTR) continue;
        if (errno == ECONNRESET) return false;
        throw ChannelClosed(Errno("recv"));
      }
      if (r == 0) {
        if (got == 0 && eof_ok) return false;
        throw ChannelClosed("peer closed mid-frame");
      }
      got += size_t(r);
    }
    return true;
  }

  int fd_;
};

}  // namespace

SocketListener::SocketListener(uint16_t port, const std::string& host) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw ChannelClosed(Errno("socket"));
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd_);
    throw ParameterError("bad listen address " + host);
  }
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 || ::listen(fd_, 1) < 0) {
    const std::string msg = Errno("bind/listen");
    ::close(fd_);
    throw ChannelClosed(msg);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

SocketListener::~SocketListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Endpoint> SocketListener::Accept() {
  for (;;) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) return std::make_unique<SocketEndpoint>(fd);
    if (errno != EINTR) throw ChannelClosed(Errno("accept"));
  }
}

std::unique_ptr<Endpoint> ConnectSocket(const std::string& host, uint16_t port, int timeout_ms) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &res) != 0 || res == nullptr) {
    throw ParameterError("cannot resolve " + host);
  }
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  for (;;) {
    const int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    if (fd >= 0 && ::connect(fd, res->ai_addr, res->ai_addrlen) == 0) {
      ::freeaddrinfo(res);
      return std::make_unique<SocketEndpoint>(fd);
    }
    if (fd >= 0) ::close(fd);
    if (std::chrono::steady_clock::now() >= deadline) {
      ::freeaddrinfo(res);
      throw ChannelClosed("cannot connect to " + host + ":" + service);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

}  // namespace sectrain::transport
