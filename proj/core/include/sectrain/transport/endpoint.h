#ifndef SECTRAIN_TRANSPORT_ENDPOINT_H_
#define SECTRAIN_TRANSPORT_ENDPOINT_H_

#include <array>
#include <cstdint>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "sectrain/common/bytes.h"
#include "sectrain/common/phase.h"

namespace sectrain::transport {

// Every frame is tag (u8) + payload length (u32 LE) + payload.
inline constexpr size_t kFrameHeaderBytes = 5;
// Tag of a frame carrying a peer's error message instead of protocol data.
inline constexpr uint8_t kErrorTag = 0xFF;

struct PhaseStats {
  uint64_t bytes_sent = 0;
  uint64_t bytes_received = 0;
  uint64_t messages_sent = 0;
  uint64_t messages_received = 0;
  // Direction changes attributed to the phase of the message that caused them.
  uint64_t rounds = 0;
};

struct CommReport {
  std::array<PhaseStats, kPhaseCount> phases{};

  const PhaseStats& at(Phase p) const { return phases[static_cast<int>(p)]; }
  // Bytes in both directions, headers included.
  uint64_t total_bytes() const;
  uint64_t total_bytes(Phase p) const;
  uint64_t rounds() const;
};

struct TranscriptEntry {
  bool outgoing = false;
  uint8_t tag = 0;
  Bytes payload;
};

// One side of a duplex two-party channel. Used by a single thread; the
// report may be read from any thread.
class Endpoint {
 public:
  virtual ~Endpoint() = default;

  void Send(Phase phase, std::span<const uint8_t> payload);
  // Throws ProtocolError on a tag other than `expected` (or a peer error
  // frame) and ChannelClosed once the peer is gone.
  Bytes Recv(Phase expected);
  // Accepts any phase tag; for request loops.
  Bytes RecvAny(Phase& phase);
  // Best effort; never throws.
  void SendError(const std::string& message);
  virtual void Close() = 0;

  CommReport report() const;
  void ResetReport();
  void RecordTranscript(bool on);
  std::vector<TranscriptEntry> transcript() const;

 protected:
  virtual void WriteFrame(uint8_t tag, std::span<const uint8_t> payload) = 0;
  // Returns false when the peer closed the channel.
  virtual bool ReadFrame(uint8_t& tag, Bytes& payload) = 0;

 private:
  void Account(bool outgoing, uint8_t tag, std::span<const uint8_t> payload);

  mutable std::mutex mu_;
  CommReport report_;
  int last_direction_ = -1;  // 1 outgoing, 0 incoming
  bool record_ = false;
  std::vector<TranscriptEntry> transcript_;
};

}  // namespace sectrain::transport

#endif  // SECTRAIN_TRANSPORT_ENDPOINT_H_
