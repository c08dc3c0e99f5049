#include "sectrain/he/evaluator.h"

#include "sectrain/common/errors.h"

namespace sectrain::he {

namespace {
constexpr uint64_t kEncryptDomain = 0x656e63;
}

Evaluator::Evaluator(std::shared_ptr<const Scheme> scheme, KeySet keys, OpMeter* meter,
                     uint64_t seed)
    : scheme_(std::move(scheme)), keys_(std::move(keys)), meter_(meter),
      rng_(seed, {kEncryptDomain}) {
  if (keys_.backend != scheme_->backend()) throw ContractError("key backend mismatch");
}

Ciphertext Evaluator::Encrypt(const ring::RingElem& m) {
  ScopedOp op(meter_, OpKind::kEnc);
  return scheme_->Encrypt(m, keys_, rng_);
}

ring::RingElem Evaluator::Decrypt(const Ciphertext& c) const {
  ScopedOp op(meter_, OpKind::kDec);
  return scheme_->Decrypt(c, keys_);
}

Ciphertext Evaluator::CpMul(const Ciphertext& c, const ring::RingElem& pt) const {
  ScopedOp op(meter_, OpKind::kCpMul);
  return scheme_->MultiplyPlain(c, pt);
}

Ciphertext Evaluator::CcMul(const Ciphertext& a, const Ciphertext& b) const {
  Ciphertext tensor = [&] {
    ScopedOp op(meter_, OpKind::kCcMul);
    return scheme_->Multiply(a, b);
  }();
  ScopedOp op(meter_, OpKind::kRelin);
  return scheme_->Relinearize(tensor, keys_);
}

Ciphertext Evaluator::CcAdd(const Ciphertext& a, const Ciphertext& b) const {
  ScopedOp op(meter_, OpKind::kCcAdd);
  return scheme_->Add(a, b);
}

ring::RingElem Evaluator::PpMul(const ring::RingElem& a, const ring::RingElem& b) const {
  ScopedOp op(meter_, OpKind::kPpMul);
  return a * b;
}

Ciphertext Evaluator::ReadCiphertext(ByteReader& in, double noise) const {
  return DeserializeCiphertext(in, scheme_->cipher_ring(), noise, scheme_->backend());
}

}  // namespace sectrain::he
