#ifndef SECTRAIN_HE_CIPHERTEXT_H_
#define SECTRAIN_HE_CIPHERTEXT_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "sectrain/common/bytes.h"
#include "sectrain/ring/ring.h"

namespace sectrain::he {

enum class Backend : uint8_t { kTransparent = 0, kRlwe = 1 };

std::string_view BackendName(Backend b);
Backend ParseBackend(std::string_view name);

// Two or three ring elements plus the tracked noise bound. The transparent
// backend stores (m, 0) over the plaintext ring.
class Ciphertext {
 public:
  Ciphertext() = default;
  Ciphertext(std::vector<ring::RingElem> parts, double noise, Backend backend);

  size_t size() const { return parts_.size(); }
  const ring::RingElem& part(size_t i) const { return parts_.at(i); }
  const std::vector<ring::RingElem>& parts() const { return parts_; }
  double noise_estimate() const { return noise_; }
  Backend backend() const { return backend_; }

 private:
  std::vector<ring::RingElem> parts_;
  double noise_ = 0;
  Backend backend_ = Backend::kRlwe;
};

// Part count (u8) followed by the ring serialization of each part.
void Serialize(const Ciphertext& c, ByteWriter& out);
// The receiver supplies the noise estimate and backend; neither is on the wire.
Ciphertext DeserializeCiphertext(ByteReader& in, const ring::RingParams& params,
                                 double noise, Backend backend);

}  // namespace sectrain::he

#endif  // SECTRAIN_HE_CIPHERTEXT_H_
