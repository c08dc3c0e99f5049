#include "sectrain/transport/endpoint.h"

#include <limits>
#include <string>

#include "sectrain/common/errors.h"

namespace sectrain::transport {

uint64_t CommReport::total_bytes() const {
  uint64_t t = 0;
  for (const auto& p : phases) t += p.bytes_sent + p.bytes_received;
  return t;
}

uint64_t CommReport::total_bytes(Phase p) const {
  return at(p).bytes_sent + at(p).bytes_received;
}

uint64_t CommReport::rounds() const {
  uint64_t r = 0;
  for (const auto& p : phases) r += p.rounds;
  return r;
}

void Endpoint::Send(Phase phase, std::span<const uint8_t> payload) {
  if (payload.size() > std::numeric_limits<uint32_t>::max()) {
    throw ParameterError("payload exceeds the frame length field");
  }
  const uint8_t tag = static_cast<uint8_t>(phase);
  WriteFrame(tag, payload);
  Account(true, tag, payload);
}

Bytes Endpoint::Recv(Phase expected) {
  uint8_t tag = 0;
  Bytes payload;
  if (!ReadFrame(tag, payload)) throw ChannelClosed("peer closed the channel");
  Account(false, tag, payload);
  if (tag == kErrorTag) {
    throw ProtocolError("peer error: " + std::string(payload.begin(), payload.end()));
  }
  if (tag != static_cast<uint8_t>(expected)) {
    throw ProtocolError("expected a " + std::string(PhaseName(expected)) + " frame, got tag " +
                        std::to_string(tag));
  }
  return payload;
}

Bytes Endpoint::RecvAny(Phase& phase) {
  uint8_t tag = 0;
  Bytes payload;
  if (!ReadFrame(tag, payload)) throw ChannelClosed("peer closed the channel");
  Account(false, tag, payload);
  if (tag == kErrorTag) {
    throw ProtocolError("peer error: " + std::string(payload.begin(), payload.end()));
  }
  if (tag >= kPhaseCount) throw ProtocolError("unknown frame tag " + std::to_string(tag));
  phase = static_cast<Phase>(tag);
  return payload;
}

void Endpoint::SendError(const std::string& message) {
  try {
    std::span<const uint8_t> bytes(reinterpret_cast<const uint8_t*>(message.data()),
                                   message.size());
    WriteFrame(kErrorTag, bytes);
  } catch (...) {
  }
}

void Endpoint::Account(bool outgoing, uint8_t tag, std::span<const uint8_t> payload) {
  std::lock_guard lock(mu_);
  if (record_) transcript_.push_back({outgoing, tag, Bytes(payload.begin(), payload.end())});
  if (tag >= kPhaseCount) return;
  PhaseStats& s = report_.phases[tag];
  const uint64_t bytes = payload.size() + kFrameHeaderBytes;
  if (outgoing) {
    s.bytes_sent += bytes;
    ++s.messages_sent;
  } else {
    s.bytes_received += bytes;
    ++s.messages_received;
  }
  const int dir = outgoing ? 1 : 0;
  if (last_direction_ != -1 && last_direction_ != dir) ++s.rounds;
  last_direction_ = dir;
}

CommReport Endpoint::report() const {
  std::lock_guard lock(mu_);
  return report_;
}

void Endpoint::ResetReport() {
  std::lock_guard lock(mu_);
  report_ = {};
  last_direction_ = -1;
}

void Endpoint::RecordTranscript(bool on) {
  std::lock_guard lock(mu_);
  record_ = on;
}

std::vector<TranscriptEntry> Endpoint::transcript() const {
  std::lock_guard lock(mu_);
  return transcript_;
}

}  // namespace sectrain::transport
