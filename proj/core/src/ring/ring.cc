#include "sectrain/ring/ring.h"

#include <algorithm>
#include <bit>
#include <string>

#include "sectrain/common/errors.h"

namespace sectrain::ring {

struct RingParams::Data {
  uint32_t degree;
  std::vector<Modulus> moduli;
  std::vector<std::shared_ptr<const NttTables>> ntt;  // empty if disabled
};

RingParams RingParams::Create(uint32_t degree, std::vector<uint64_t> moduli) {
  if (degree == 0 || !std::has_single_bit(degree)) {
    throw ParameterError("ring degree must be a power of two: " + std::to_string(degree));
  }
  if (moduli.empty() || moduli.size() > kMaxLimbs) {
    throw ParameterError("ring modulus must have 1 or 2 limbs");
  }
  auto data = std::make_shared<Data>();
  data->degree = degree;
  for (uint64_t m : moduli) data->moduli.emplace_back(m);
  if (moduli.size() == 2 && moduli[0] == moduli[1]) {
    throw ParameterError("RNS limbs must be distinct");
  }
  const uint64_t two_n = 2 * uint64_t(degree);
  const bool ntt = degree >= 2 && std::all_of(moduli.begin(), moduli.end(), [&](uint64_t m) {
                     return m % two_n == 1 && IsPrime(m);
                   });
  if (ntt) {
    for (const auto& m : data->moduli) data->ntt.push_back(NttTables::Get(degree, m));
  }
  RingParams out;
  out.data_ = std::move(data);
  return out;
}

uint32_t RingParams::degree() const { return data_->degree; }
size_t RingParams::limbs() const { return data_->moduli.size(); }
const Modulus& RingParams::modulus(size_t limb) const { return data_->moduli[limb]; }
bool RingParams::ntt_enabled() const { return !data_->ntt.empty(); }

std::vector<uint64_t> RingParams::modulus_values() const {
  std::vector<uint64_t> out;
  for (const auto& m : data_->moduli) out.push_back(m.value());
  return out;
}

const NttTables& RingParams::ntt(size_t limb) const {
  if (!ntt_enabled()) throw ParameterError("modulus is not NTT-friendly for this degree");
  return *data_->ntt[limb];
}

bool operator==(const RingParams& a, const RingParams& b) {
  if (a.data_ == b.data_) return true;
  if (!a.data_ || !b.data_) return false;
  return a.data_->degree == b.data_->degree && a.data_->moduli == b.data_->moduli;
}

// ---------------------------------------------------------------------------

RingElem::RingElem(RingParams params, Domain domain)
    : params_(std::move(params)), domain_(domain) {
  if (!params_.valid()) throw ParameterError("uninitialised ring parameters");
  data_.assign(params_.limbs() * params_.degree(), 0);
}

RingElem RingElem::FromCoeffs(RingParams params, std::span<const uint64_t> coeffs) {
  RingElemBuilder b(params);
  const uint32_t n = params.degree();
  if (coeffs.size() == n) {
    for (size_t k = 0; k < params.limbs(); ++k) {
      auto dst = b.limb(k);
      for (uint32_t i = 0; i < n; ++i) dst[i] = params.modulus(k).Reduce(coeffs[i]);
    }
    if (params.limbs() == 1) {
      for (uint32_t i = 0; i < n; ++i) {
        if (coeffs[i] >= params.modulus(0).value()) {
          throw ParameterError("coefficient out of range");
        }
      }
    }
  } else if (coeffs.size() == n * params.limbs()) {
    for (size_t k = 0; k < params.limbs(); ++k) {
      auto dst = b.limb(k);
      for (uint32_t i = 0; i < n; ++i) {
        const uint64_t v = coeffs[k * n + i];
        if (v >= params.modulus(k).value()) throw ParameterError("coefficient out of range");
        dst[i] = v;
      }
    }
  } else {
    throw ParameterError("coefficient count " + std::to_string(coeffs.size()) +
                         " does not match ring degree " + std::to_string(n));
  }
  return std::move(b).Build();
}

RingElem RingElem::FromSigned(RingParams params, std::span<const int64_t> coeffs) {
  if (coeffs.size() != params.degree()) {
    throw ParameterError("coefficient count does not match ring degree");
  }
  RingElemBuilder b(params);
  for (size_t i = 0; i < coeffs.size(); ++i) b.SetSigned(i, coeffs[i]);
  return std::move(b).Build();
}

RingElem RingElem::Monomial(RingParams params, uint32_t exponent, int64_t scale) {
  if (exponent >= params.degree()) throw ParameterError("monomial exponent >= N");
  RingElemBuilder b(params);
  b.SetSigned(exponent, scale);
  return std::move(b).Build();
}

std::vector<int64_t> RingElem::ToSigned() const {
  if (limbs() != 1) throw ParameterError("ToSigned needs a single-limb ring");
  std::vector<int64_t> out(degree());
  const Modulus& m = params_.modulus(0);
  for (uint32_t i = 0; i < degree(); ++i) out[i] = m.ToSigned(data_[i]);
  return out;
}

bool RingElem::IsZero() const {
  return std::all_of(data_.begin(), data_.end(), [](uint64_t v) { return v == 0; });
}

bool operator==(const RingElem& a, const RingElem& b) {
  return a.params_ == b.params_ && a.domain_ == b.domain_ && a.data_ == b.data_;
}

RingElemBuilder::RingElemBuilder(RingParams params, Domain domain)
    : params_(std::move(params)), domain_(domain) {
  data_.assign(params_.limbs() * params_.degree(), 0);
}

RingElemBuilder::RingElemBuilder(RingElem elem)
    : params_(elem.params_), domain_(elem.domain_), data_(std::move(elem.data_)) {}

void RingElemBuilder::SetSigned(size_t index, int64_t value) {
  for (size_t k = 0; k < params_.limbs(); ++k) {
    data_[k * params_.degree() + index] = params_.modulus(k).FromSigned(value);
  }
}

RingElem RingElemBuilder::Build() && {
  return RingElem(std::move(params_), domain_, std::move(data_));
}

// ---------------------------------------------------------------------------

namespace {

void CheckSame(const RingElem& a, const RingElem& b, const char* op) {
  if (!(a.params() == b.params())) {
    throw ParameterError(std::string(op) + ": ring parameter mismatch");
  }
  if (a.domain() != b.domain()) {
    throw ParameterError(std::string(op) + ": domain mismatch");
  }
}

template <typename F>
RingElem Binary(const RingElem& a, const RingElem& b, const char* op, F f) {
  CheckSame(a, b, op);
  RingElemBuilder out(a.params(), a.domain());
  for (size_t k = 0; k < a.limbs(); ++k) {
    const Modulus& m = a.params().modulus(k);
    auto x = a.limb(k), y = b.limb(k);
    auto z = out.limb(k);
    for (size_t i = 0; i < z.size(); ++i) z[i] = f(m, x[i], y[i]);
  }
  return std::move(out).Build();
}

}  // namespace

RingElem Add(const RingElem& a, const RingElem& b) {
  return Binary(a, b, "add", [](const Modulus& m, uint64_t x, uint64_t y) { return m.Add(x, y); });
}

RingElem Sub(const RingElem& a, const RingElem& b) {
  return Binary(a, b, "sub", [](const Modulus& m, uint64_t x, uint64_t y) { return m.Sub(x, y); });
}

RingElem PointwiseMul(const RingElem& a, const RingElem& b) {
  if (a.domain() != Domain::kEvaluation) throw ParameterError("pointwise: not in evaluation domain");
  return Binary(a, b, "pointwise", [](const Modulus& m, uint64_t x, uint64_t y) { return m.Mul(x, y); });
}

RingElem Negate(const RingElem& a) {
  RingElemBuilder out(a.params(), a.domain());
  for (size_t k = 0; k < a.limbs(); ++k) {
    const Modulus& m = a.params().modulus(k);
    auto x = a.limb(k);
    auto z = out.limb(k);
    for (size_t i = 0; i < z.size(); ++i) z[i] = m.Neg(x[i]);
  }
  return std::move(out).Build();
}

RingElem MulScalar(const RingElem& a, int64_t scalar) {
  RingElemBuilder out(a.params(), a.domain());
  for (size_t k = 0; k < a.limbs(); ++k) {
    const Modulus& m = a.params().modulus(k);
    const uint64_t s = m.FromSigned(scalar);
    auto x = a.limb(k);
    auto z = out.limb(k);
    for (size_t i = 0; i < z.size(); ++i) z[i] = m.Mul(x[i], s);
  }
  return std::move(out).Build();
}

RingElem NttForward(const RingElem& a) {
  if (a.domain() != Domain::kCoefficient) throw ParameterError("NttForward: already in evaluation domain");
  RingElemBuilder out(a.params(), Domain::kEvaluation);
  for (size_t k = 0; k < a.limbs(); ++k) {
    const NttTables& t = a.params().ntt(k);
    auto z = out.limb(k);
    std::copy(a.limb(k).begin(), a.limb(k).end(), z.begin());
    t.Forward(z);
  }
  return std::move(out).Build();
}

RingElem NttInverse(const RingElem& a) {
  if (a.domain() != Domain::kEvaluation) throw ParameterError("NttInverse: not in evaluation domain");
  RingElemBuilder out(a.params(), Domain::kCoefficient);
  for (size_t k = 0; k < a.limbs(); ++k) {
    const NttTables& t = a.params().ntt(k);
    auto z = out.limb(k);
    std::copy(a.limb(k).begin(), a.limb(k).end(), z.begin());
    t.Inverse(z);
  }
  return std::move(out).Build();
}

RingElem MulSchoolbook(const RingElem& a, const RingElem& b) {
  CheckSame(a, b, "mul");
  if (a.domain() != Domain::kCoefficient) throw ParameterError("mul: evaluation-domain operand");
  const uint32_t n = a.degree();
  RingElemBuilder out(a.params());
  for (size_t k = 0; k < a.limbs(); ++k) {
    const Modulus& m = a.params().modulus(k);
    auto x = a.limb(k), y = b.limb(k);
    auto z = out.limb(k);
    for (uint32_t i = 0; i < n; ++i) {
      if (x[i] == 0) continue;
      for (uint32_t j = 0; j < n; ++j) {
        const uint64_t prod = m.Mul(x[i], y[j]);
        const uint32_t d = i + j;
        if (d < n) {
          z[d] = m.Add(z[d], prod);
        } else {
          z[d - n] = m.Sub(z[d - n], prod);  // x^N = -1
        }
      }
    }
  }
  return std::move(out).Build();
}

RingElem Mul(const RingElem& a, const RingElem& b) {
  CheckSame(a, b, "mul");
  if (a.domain() != Domain::kCoefficient) throw ParameterError("mul: evaluation-domain operand");
  if (a.IsZero() || b.IsZero()) return RingElem(a.params());
  if (!a.params().ntt_enabled()) return MulSchoolbook(a, b);
  return NttInverse(PointwiseMul(NttForward(a), NttForward(b)));
}

// ---------------------------------------------------------------------------

size_t SerializedSize(const RingParams& params) {
  return 4 + 1 + size_t(params.degree()) * params.limbs() * 8;
}

void Serialize(const RingElem& a, ByteWriter& out) {
  if (a.domain() != Domain::kCoefficient) {
    throw SerializationError("only coefficient-domain elements are serialised");
  }
  out.PutU32(a.degree());
  out.PutU8(static_cast<uint8_t>(a.limbs()));
  for (uint32_t i = 0; i < a.degree(); ++i) {
    for (size_t k = 0; k < a.limbs(); ++k) out.PutU64(a.coeff(i, k));
  }
}

RingElem Deserialize(ByteReader& in, const RingParams& params) {
  const uint32_t n = in.GetU32();
  const size_t limbs = in.GetU8();
  if (n != params.degree() || limbs != params.limbs()) {
    throw SerializationError("ring element header does not match parameters");
  }
  RingElemBuilder b(params);
  for (uint32_t i = 0; i < n; ++i) {
    for (size_t k = 0; k < limbs; ++k) {
      const uint64_t v = in.GetU64();
      if (v >= params.modulus(k).value()) throw SerializationError("coefficient out of range");
      b.Set(i, k, v);
    }
  }
  return std::move(b).Build();
}

}  // namespace sectrain::ring
