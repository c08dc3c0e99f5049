#include "sectrain/transport/memory_channel.h"

#include <chrono>
#include <condition_variable>
#include <deque>
#include <thread>

#include "sectrain/common/errors.h"

namespace sectrain::transport {

using Clock = std::chrono::steady_clock;

double LinkModel::TransferSeconds(uint64_t bytes) const {
  return double(bytes) * 8 / (bandwidth_mbps * 1e6);
}

double ModeledNetworkSeconds(const CommReport& report, const LinkModel& link) {
  uint64_t bytes = 0;
  for (const auto& p : report.phases) bytes += p.bytes_sent + p.bytes_received;
  return link.TransferSeconds(bytes) + double(report.rounds() + 1) * link.ping_ms / 2e3;
}

namespace {

struct Frame {
  uint8_t tag;
  Bytes payload;
  Clock::time_point deliver_at;
};

struct Direction {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<Frame> frames;
  bool closed = false;
  Clock::time_point link_free{};
};

struct Shared {
  Direction dir[2];  // dir[k] carries frames sent by side k
  std::optional<LinkModel> link;
};

class MemoryEndpoint final : public Endpoint {
 public:
  MemoryEndpoint(std::shared_ptr<Shared> shared, int side)
      : shared_(std::move(shared)), side_(side) {}
  ~MemoryEndpoint() override { Close(); }

  void Close() override {
    for (auto& d : shared_->dir) {
      std::lock_guard lock(d.mu);
      d.closed = true;
      d.cv.notify_all();
    }
  }

 protected:
  void WriteFrame(uint8_t tag, std::span<const uint8_t> payload) override {
    Direction& d = shared_->dir[side_];
    std::lock_guard lock(d.mu);
    if (d.closed) throw ChannelClosed("channel closed");
    Frame f{tag, Bytes(payload.begin(), payload.end()), Clock::now()};
    if (shared_->link) {
      const auto start = std::max(f.deliver_at, d.link_free);
      const auto busy = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(
          shared_->link->TransferSeconds(payload.size() + kFrameHeaderBytes)));
      d.link_free = start + busy;
      f.deliver_at = d.link_free + std::chrono::duration_cast<Clock::duration>(
                                       std::chrono::duration<double>(shared_->link->ping_ms / 2e3));
    }
    d.frames.push_back(std::move(f));
    d.cv.notify_one();
  }

  bool ReadFrame(uint8_t& tag, Bytes& payload) override {
    Direction& d = shared_->dir[1 - side_];
    Frame f;
    {
      std::unique_lock lock(d.mu);
      d.cv.wait(lock, [&] { return !d.frames.empty() || d.closed; });
      if (d.frames.empty()) return false;
      f = std::move(d.frames.front());
      d.frames.pop_front();
    }
    if (shared_->link) std::this_thread::sleep_until(f.deliver_at);
    tag = f.tag;
    payload = std::move(f.payload);
    return true;
  }

 private:
  std::shared_ptr<Shared> shared_;
  int side_;
};

}  // namespace

EndpointPair MakeMemoryChannel(std::optional<LinkModel> link) {
  auto shared = std::make_shared<Shared>();
  shared->link = link;
  return {std::make_unique<MemoryEndpoint>(shared, 0), std::make_unique<MemoryEndpoint>(shared, 1)};
}

}  // namespace sectrain::transport
