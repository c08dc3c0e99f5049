#include "sectrain/he/ciphertext.h"

#include <string>

#include "sectrain/common/errors.h"

namespace sectrain::he {

std::string_view BackendName(Backend b) {
  return b == Backend::kTransparent ? "clear" : "rlwe";
}

Backend ParseBackend(std::string_view name) {
  if (name == "clear" || name == "transparent") return Backend::kTransparent;
  if (name == "rlwe") return Backend::kRlwe;
  throw ParameterError("unknown backend: " + std::string(name));
}

Ciphertext::Ciphertext(std::vector<ring::RingElem> parts, double noise, Backend backend)
    : parts_(std::move(parts)), noise_(noise), backend_(backend) {
  if (parts_.size() != 2 && parts_.size() != 3) {
    throw ContractError("ciphertext must have 2 or 3 parts");
  }
  for (const auto& p : parts_) {
    if (!(p.params() == parts_[0].params())) throw ContractError("ciphertext parts disagree");
  }
}

void Serialize(const Ciphertext& c, ByteWriter& out) {
  out.PutU8(static_cast<uint8_t>(c.size()));
  for (const auto& p : c.parts()) ring::Serialize(p, out);
}

Ciphertext DeserializeCiphertext(ByteReader& in, const ring::RingParams& params,
                                 double noise, Backend backend) {
  const uint8_t count = in.GetU8();
  if (count != 2 && count != 3) {
    throw SerializationError("bad ciphertext part count " + std::to_string(count));
  }
  std::vector<ring::RingElem> parts;
  for (uint8_t i = 0; i < count; ++i) parts.push_back(ring::Deserialize(in, params));
  return Ciphertext(std::move(parts), noise, backend);
}

}  // namespace sectrain::he
