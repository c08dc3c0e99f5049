#include "sectrain/he/scheme.h"

#include "sectrain/common/errors.h"
#include "backends.h"

namespace sectrain::he {

Ciphertext Scheme::Add(const Ciphertext& a, const Ciphertext& b) const {
  CheckOwn(a);
  CheckOwn(b);
  if (a.size() != b.size()) throw ContractError("cc_add: part-count mismatch");
  std::vector<ring::RingElem> parts;
  for (size_t i = 0; i < a.size(); ++i) parts.push_back(a.part(i) + b.part(i));
  return Ciphertext(std::move(parts), noise().AfterAdd(a.noise_estimate(), b.noise_estimate()),
                    backend());
}

void Scheme::CheckPlain(const ring::RingElem& m) const {
  if (!(m.params() == params().plain)) throw ParameterError("plaintext not over the plain modulus");
  if (m.domain() != ring::Domain::kCoefficient) throw ParameterError("plaintext in evaluation domain");
}

void Scheme::CheckOwn(const Ciphertext& c) const {
  if (c.backend() != backend()) throw ContractError("ciphertext from a different backend");
  if (!(c.part(0).params() == cipher_ring())) throw ContractError("ciphertext ring mismatch");
}

std::shared_ptr<const Scheme> MakeScheme(Backend backend, const HeParams& params) {
  if (backend == Backend::kTransparent) return std::make_shared<TransparentScheme>(params);
  return std::make_shared<RlweScheme>(params);
}

}  // namespace sectrain::he
