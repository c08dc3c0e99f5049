#include "sectrain/he/keys.h"

#include "sectrain/common/errors.h"

namespace sectrain::he {

KeySet KeySet::PublicOnly() const {
  KeySet out = *this;
  out.secret.reset();
  return out;
}

void SerializePublic(const KeySet& keys, ByteWriter& out) {
  out.PutU8(static_cast<uint8_t>(keys.backend));
  if (keys.backend == Backend::kTransparent) return;
  ring::Serialize(ring::NttInverse(keys.public_key.p0), out);
  ring::Serialize(ring::NttInverse(keys.public_key.p1), out);
  out.PutU8(static_cast<uint8_t>(keys.relin_key.b.size()));
  for (size_t j = 0; j < keys.relin_key.b.size(); ++j) {
    ring::Serialize(ring::NttInverse(keys.relin_key.b[j]), out);
    ring::Serialize(ring::NttInverse(keys.relin_key.a[j]), out);
  }
}

KeySet DeserializePublic(ByteReader& in, const ring::RingParams& params) {
  KeySet keys;
  const uint8_t tag = in.GetU8();
  if (tag > 1) throw SerializationError("unknown key backend tag");
  keys.backend = static_cast<Backend>(tag);
  if (keys.backend == Backend::kTransparent) return keys;
  keys.public_key.p0 = ring::NttForward(ring::Deserialize(in, params));
  keys.public_key.p1 = ring::NttForward(ring::Deserialize(in, params));
  const uint8_t digits = in.GetU8();
  for (uint8_t j = 0; j < digits; ++j) {
    keys.relin_key.b.push_back(ring::NttForward(ring::Deserialize(in, params)));
    keys.relin_key.a.push_back(ring::NttForward(ring::Deserialize(in, params)));
  }
  return keys;
}

}  // namespace sectrain::he
