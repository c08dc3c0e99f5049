#include "backends.h"
#include "sectrain/common/errors.h"

namespace sectrain::he {

KeySet TransparentScheme::KeyGen(uint64_t) const {
  KeySet keys;
  keys.backend = Backend::kTransparent;
  keys.secret = std::make_shared<SecretKey>();
  return keys;
}

Ciphertext TransparentScheme::Encrypt(const ring::RingElem& m, const KeySet& keys,
                                      Prng&) const {
  CheckPlain(m);
  if (keys.backend != backend()) throw ContractError("key backend mismatch");
  return Ciphertext({m, ring::RingElem(params().plain)}, noise().Fresh(), backend());
}

ring::RingElem TransparentScheme::Decrypt(const Ciphertext& c, const KeySet& keys) const {
  CheckOwn(c);
  if (!keys.has_secret()) throw ContractError("decryption needs the secret key");
  if (!noise().Decryptable(c.noise_estimate())) {
    throw DecryptionFailure("noise bound exceeds the decryption budget");
  }
  return c.part(0);
}

Ciphertext TransparentScheme::MultiplyPlain(const Ciphertext& c, const ring::RingElem& pt) const {
  CheckOwn(c);
  CheckPlain(pt);
  if (c.size() != 2) throw ContractError("cp_mul needs a 2-part ciphertext");
  return Ciphertext({c.part(0) * pt, c.part(1) * pt}, noise().AfterPlainMul(c.noise_estimate()),
                    backend());
}

Ciphertext TransparentScheme::Multiply(const Ciphertext& a, const Ciphertext& b) const {
  CheckOwn(a);
  CheckOwn(b);
  if (a.size() != 2 || b.size() != 2) throw ContractError("cc_mul needs 2-part ciphertexts");
  return Ciphertext({a.part(0) * b.part(0), a.part(0) * b.part(1) + a.part(1) * b.part(0),
                     a.part(1) * b.part(1)},
                    noise().AfterTensor(a.noise_estimate(), b.noise_estimate()), backend());
}

Ciphertext TransparentScheme::Relinearize(const Ciphertext& c, const KeySet& keys) const {
  CheckOwn(c);
  if (keys.backend != backend()) throw ContractError("key backend mismatch");
  if (c.size() != 3) throw ContractError("relinearize needs a 3-part ciphertext");
  return Ciphertext({c.part(0), c.part(1)}, noise().AfterRelin(c.noise_estimate()), backend());
}

}  // namespace sectrain::he
