#ifndef SECTRAIN_HE_KEYS_H_
#define SECTRAIN_HE_KEYS_H_

#include <memory>
#include <optional>
#include <vector>

#include "sectrain/common/bytes.h"
#include "sectrain/he/ciphertext.h"
#include "sectrain/ring/ring.h"

namespace sectrain::he {

// Ternary secret, held in both domains. Has no serializer on purpose.
struct SecretKey {
  ring::RingElem s;
  ring::RingElem s_ntt;
};

// (-(a*s + e), a), evaluation domain.
struct PublicKey {
  ring::RingElem p0;
  ring::RingElem p1;
};

// One (b_j, a_j) pair per base-2^W digit, evaluation domain.
struct RelinKey {
  std::vector<ring::RingElem> b;
  std::vector<ring::RingElem> a;
};

struct KeySet {
  Backend backend = Backend::kRlwe;
  std::shared_ptr<const SecretKey> secret;
  PublicKey public_key;
  RelinKey relin_key;

  bool has_secret() const { return secret != nullptr; }
  // Copy without the secret key, as handed to the server.
  KeySet PublicOnly() const;
};

// Public and relinearization keys; the transparent backend writes only
// its header.
void SerializePublic(const KeySet& keys, ByteWriter& out);
KeySet DeserializePublic(ByteReader& in, const ring::RingParams& params);

}  // namespace sectrain::he

#endif  // SECTRAIN_HE_KEYS_H_
