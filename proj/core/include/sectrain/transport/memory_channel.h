#ifndef SECTRAIN_TRANSPORT_MEMORY_CHANNEL_H_
#define SECTRAIN_TRANSPORT_MEMORY_CHANNEL_H_

#include <memory>
#include <optional>
#include <utility>

#include "sectrain/transport/endpoint.h"

namespace sectrain::transport {

// Point-to-point link parameters. A frame of b bytes sent at time s is
// delivered at max(s, link free) + 8b/bandwidth + ping/2.
struct LinkModel {
  double bandwidth_mbps = 400;
  double ping_ms = 0.5;

  double TransferSeconds(uint64_t bytes) const;
};

// Network time implied by a report: all bytes serialized on one link plus
// half a ping per direction change.
double ModeledNetworkSeconds(const CommReport& report, const LinkModel& link);

struct EndpointPair {
  std::unique_ptr<Endpoint> client;
  std::unique_ptr<Endpoint> server;
};

// In-process duplex channel. With a link model, deliveries are delayed in
// real time.
EndpointPair MakeMemoryChannel(std::optional<LinkModel> link = std::nullopt);

}  // namespace sectrain::transport

#endif  // SECTRAIN_TRANSPORT_MEMORY_CHANNEL_H_
