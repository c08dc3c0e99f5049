#include <algorithm>
#include <cmath>

#include "backends.h"
#include "sectrain/common/errors.h"

namespace sectrain::he {

using ring::Domain;
using ring::Modulus;
using ring::RingElem;
using ring::RingElemBuilder;

namespace {

constexpr uint64_t kKeygenDomain = 0x6b657967656eULL;

// Multiplies limb k by scalars[k].
RingElem ScaleLimbs(const RingElem& a, const std::vector<uint64_t>& scalars) {
  RingElemBuilder out(a.params(), a.domain());
  for (size_t k = 0; k < a.limbs(); ++k) {
    const Modulus& m = a.params().modulus(k);
    auto x = a.limb(k);
    auto z = out.limb(k);
    for (size_t i = 0; i < z.size(); ++i) z[i] = m.Mul(x[i], scalars[k]);
  }
  return std::move(out).Build();
}

RingElem MulNtt(const RingElem& coeff, const RingElem& eval) {
  return ring::NttInverse(ring::PointwiseMul(ring::NttForward(coeff), eval));
}

}  // namespace

RlweScheme::RlweScheme(const HeParams& params)
    : Scheme(params), limbs_(params.ring.limbs()), t_(params.plain_modulus()) {
  const auto& r = params.ring;
  q_ = r.modulus(0).value();
  if (limbs_ == 2) {
    q_ *= r.modulus(1).value();
    q0_inv_ = r.modulus(1).Inverse(r.modulus(1).Reduce(r.modulus(0).value()));
  }
  delta_ = q_ / t_;
  r_t_ = static_cast<uint64_t>(q_ % t_);

  // The tensor product of centered inputs is bounded by N * q^2 / 2; the
  // extended basis must exceed twice that with slack for the sign test.
  const double need = std::log2(double(params.degree())) + params.log_q() + 8;
  std::vector<uint64_t> exclude = r.modulus_values();
  exclude.push_back(t_);
  const int aux = static_cast<int>(std::ceil(need / 59.0));
  auto aux_primes = ring::FindNttPrimes(60, 2 * uint64_t{params.degree()}, aux, exclude);
  for (size_t k = 0; k < limbs_; ++k) basis_.push_back(r.modulus(k));
  for (uint64_t p : aux_primes) basis_.emplace_back(p);
  for (const auto& m : basis_) basis_ntt_.push_back(ring::NttTables::Get(params.degree(), m));

  const size_t kb = basis_.size();
  prefix_mod_.assign(kb, {});
  prefix_inv_.assign(kb, 0);
  for (size_t i = 0; i < kb; ++i) {
    const Modulus& pi = basis_[i];
    uint64_t acc = 1;
    for (size_t j = 0; j <= i; ++j) {
      prefix_mod_[i].push_back(acc);
      acc = pi.Mul(acc, pi.Reduce(basis_[j].value()));
    }
    prefix_inv_[i] = i == 0 ? 1 : pi.Inverse(prefix_mod_[i][i]);
  }
  lift_.assign(kb, std::vector<uint64_t>(limbs_, 0));
  wrap_.assign(limbs_, 0);
  for (size_t k = 0; k < limbs_; ++k) {
    const Modulus& qk = r.modulus(k);
    uint64_t acc = qk.Reduce(t_);
    for (size_t i = limbs_; i < kb; ++i) {
      lift_[i][k] = acc;
      acc = qk.Mul(acc, qk.Reduce(basis_[i].value()));
    }
    wrap_[k] = acc;
  }
}

RlweScheme::u128 RlweScheme::Compose(uint64_t r0, uint64_t r1) const {
  if (limbs_ == 1) return r0;
  const Modulus& q1 = params().ring.modulus(1);
  const uint64_t v1 = q1.Mul(q1.Sub(r1, q1.Reduce(r0)), q0_inv_);
  return u128(r0) + u128(v1) * params().ring.modulus(0).value();
}

RlweScheme::u128 RlweScheme::ScaleRound(uint64_t v0, uint64_t v1) const {
  const uint64_t q0 = params().ring.modulus(0).value();
  if (limbs_ == 1) return (2 * u128(t_) * v0 + q0) / (2 * u128(q0));
  const uint64_t q1 = params().ring.modulus(1).value();
  const u128 tv1 = u128(t_) * v1;
  const u128 a = tv1 / q1;
  const u128 b = tv1 % q1;
  const u128 num = b * q0 + u128(t_) * v0;
  return a + (2 * num + q_) / (2 * q_);
}

RingElem RlweScheme::SampleUniform(Prng& rng) const {
  RingElemBuilder out(params().ring, Domain::kEvaluation);
  for (size_t k = 0; k < limbs_; ++k) {
    const uint64_t q = params().ring.modulus(k).value();
    for (auto& v : out.limb(k)) v = rng.Uniform(q);
  }
  return std::move(out).Build();
}

RingElem RlweScheme::SampleError(Prng& rng) const {
  std::vector<int64_t> e(params().degree());
  for (auto& v : e) v = rng.Gaussian(params().noise_stddev);
  return RingElem::FromSigned(params().ring, e);
}

RingElem RlweScheme::SampleTernary(Prng& rng) const {
  std::vector<int64_t> s(params().degree());
  for (auto& v : s) v = rng.Ternary();
  return RingElem::FromSigned(params().ring, s);
}

KeySet RlweScheme::KeyGen(uint64_t seed) const {
  Prng rng(seed, {kKeygenDomain});
  auto sk = std::make_shared<SecretKey>();
  sk->s = SampleTernary(rng);
  sk->s_ntt = ring::NttForward(sk->s);

  KeySet keys;
  keys.backend = Backend::kRlwe;
  const RingElem a = SampleUniform(rng);
  const RingElem e = ring::NttForward(SampleError(rng));
  keys.public_key.p0 = -(ring::PointwiseMul(a, sk->s_ntt) + e);
  keys.public_key.p1 = a;

  const RingElem s2 = ring::PointwiseMul(sk->s_ntt, sk->s_ntt);
  const int w = params().relin_decomp_bits;
  for (int j = 0; j < params().relin_digits(); ++j) {
    std::vector<uint64_t> scale(limbs_);
    for (size_t k = 0; k < limbs_; ++k) {
      scale[k] = params().ring.modulus(k).Pow(2, uint64_t(w) * j);
    }
    const RingElem aj = SampleUniform(rng);
    const RingElem ej = ring::NttForward(SampleError(rng));
    keys.relin_key.b.push_back(ScaleLimbs(s2, scale) + ej - ring::PointwiseMul(aj, sk->s_ntt));
    keys.relin_key.a.push_back(aj);
  }
  keys.secret = std::move(sk);
  return keys;
}

Ciphertext RlweScheme::Encrypt(const RingElem& m, const KeySet& keys, Prng& rng) const {
  CheckPlain(m);
  if (keys.backend != backend() || !keys.public_key.p0.params().valid()) {
    throw ContractError("encryption needs an RLWE public key");
  }
  RingElemBuilder scaled(params().ring);
  for (uint32_t i = 0; i < params().degree(); ++i) {
    const uint64_t mi = m.coeff(i);
    const u128 v = delta_ * mi + (u128(r_t_) * mi + t_ / 2) / t_;
    for (size_t k = 0; k < limbs_; ++k) scaled.Set(i, k, params().ring.modulus(k).Reduce128(v));
  }
  const RingElem u = ring::NttForward(SampleTernary(rng));
  const RingElem e1 = SampleError(rng);
  const RingElem e2 = SampleError(rng);
  RingElem c0 = ring::NttInverse(ring::PointwiseMul(keys.public_key.p0, u)) + e1 +
                std::move(scaled).Build();
  RingElem c1 = ring::NttInverse(ring::PointwiseMul(keys.public_key.p1, u)) + e2;
  return Ciphertext({std::move(c0), std::move(c1)}, noise().Fresh(), backend());
}

RingElem RlweScheme::Decrypt(const Ciphertext& c, const KeySet& keys) const {
  CheckOwn(c);
  if (!keys.has_secret() || keys.backend != backend()) {
    throw ContractError("decryption needs the secret key");
  }
  if (!noise().Decryptable(c.noise_estimate())) {
    throw DecryptionFailure("noise bound exceeds the decryption budget");
  }
  RingElem x = c.part(0) + MulNtt(c.part(1), keys.secret->s_ntt);
  if (c.size() == 3) {
    x = x + MulNtt(c.part(2), ring::PointwiseMul(keys.secret->s_ntt, keys.secret->s_ntt));
  }
  std::vector<uint64_t> out(params().degree());
  const Modulus& q1 = params().ring.modulus(limbs_ - 1);
  for (uint32_t i = 0; i < params().degree(); ++i) {
    const uint64_t v0 = x.coeff(i, 0);
    const uint64_t v1 =
        limbs_ == 1 ? 0 : q1.Mul(q1.Sub(x.coeff(i, 1), q1.Reduce(v0)), q0_inv_);
    out[i] = static_cast<uint64_t>(ScaleRound(v0, v1) % t_);
  }
  return RingElem::FromCoeffs(params().plain, out);
}

Ciphertext RlweScheme::MultiplyPlain(const Ciphertext& c, const RingElem& pt) const {
  CheckOwn(c);
  CheckPlain(pt);
  if (c.size() != 2) throw ContractError("cp_mul needs a 2-part ciphertext");
  const RingElem p = ring::NttForward(RingElem::FromSigned(params().ring, pt.ToSigned()));
  return Ciphertext({MulNtt(c.part(0), p), MulNtt(c.part(1), p)},
                    noise().AfterPlainMul(c.noise_estimate()), backend());
}

Ciphertext RlweScheme::Multiply(const Ciphertext& a, const Ciphertext& b) const {
  CheckOwn(a);
  CheckOwn(b);
  if (a.size() != 2 || b.size() != 2) throw ContractError("cc_mul needs 2-part ciphertexts");
  const uint32_t n = params().degree();
  const size_t kb = basis_.size();
  const u128 half_q = q_ / 2;

  // lifted[poly][prime] holds the centered lift of a ciphertext part,
  // transformed, in one prime of the extended basis.
  const RingElem* in[4] = {&a.part(0), &a.part(1), &b.part(0), &b.part(1)};
  std::vector<std::vector<std::vector<uint64_t>>> lifted(
      4, std::vector<std::vector<uint64_t>>(kb, std::vector<uint64_t>(n)));
  for (int p = 0; p < 4; ++p) {
    const RingElem& e = *in[p];
    for (size_t k = 0; k < limbs_; ++k) std::ranges::copy(e.limb(k), lifted[p][k].begin());
    for (uint32_t i = 0; i < n; ++i) {
      const u128 x = Compose(e.coeff(i, 0), limbs_ == 2 ? e.coeff(i, 1) : 0);
      const bool neg = x > half_q;
      const u128 mag = neg ? q_ - x : x;
      for (size_t j = limbs_; j < kb; ++j) {
        const uint64_t r = basis_[j].Reduce128(mag);
        lifted[p][j][i] = neg ? basis_[j].Neg(r) : r;
      }
    }
    for (size_t j = 0; j < kb; ++j) basis_ntt_[j]->Forward(lifted[p][j]);
  }

  std::vector<std::vector<std::vector<uint64_t>>> prod(
      3, std::vector<std::vector<uint64_t>>(kb, std::vector<uint64_t>(n)));
  for (size_t j = 0; j < kb; ++j) {
    const Modulus& m = basis_[j];
    const auto& a0 = lifted[0][j];
    const auto& a1 = lifted[1][j];
    const auto& b0 = lifted[2][j];
    const auto& b1 = lifted[3][j];
    for (uint32_t i = 0; i < n; ++i) {
      prod[0][j][i] = m.Mul(a0[i], b0[i]);
      prod[1][j][i] = m.Add(m.Mul(a0[i], b1[i]), m.Mul(a1[i], b0[i]));
      prod[2][j][i] = m.Mul(a1[i], b1[i]);
    }
    for (int d = 0; d < 3; ++d) basis_ntt_[j]->Inverse(prod[d][j]);
  }

  std::vector<RingElem> parts;
  std::vector<uint64_t> v(kb);
  const Modulus& top = basis_.back();
  for (int d = 0; d < 3; ++d) {
    RingElemBuilder out(params().ring);
    for (uint32_t i = 0; i < n; ++i) {
      // Garner mixed-radix digits of the product coefficient.
      for (size_t j = 0; j < kb; ++j) {
        const Modulus& m = basis_[j];
        uint64_t acc = 0;
        for (size_t l = 0; l < j; ++l) acc = m.Add(acc, m.Mul(m.Reduce(v[l]), prefix_mod_[j][l]));
        v[j] = m.Mul(m.Sub(prod[d][j][i], acc), prefix_inv_[j]);
      }
      const bool neg = v[kb - 1] > top.value() / 2;
      const u128 frac = ScaleRound(v[0], limbs_ == 2 ? v[1] : 0);
      for (size_t k = 0; k < limbs_; ++k) {
        const Modulus& qk = params().ring.modulus(k);
        uint64_t r = qk.Reduce128(frac);
        for (size_t j = limbs_; j < kb; ++j) r = qk.Add(r, qk.Mul(qk.Reduce(v[j]), lift_[j][k]));
        if (neg) r = qk.Sub(r, wrap_[k]);
        out.Set(i, k, r);
      }
    }
    parts.push_back(std::move(out).Build());
  }
  return Ciphertext(std::move(parts), noise().AfterTensor(a.noise_estimate(), b.noise_estimate()),
                    backend());
}

Ciphertext RlweScheme::Relinearize(const Ciphertext& c, const KeySet& keys) const {
  CheckOwn(c);
  if (c.size() != 3) throw ContractError("relinearize needs a 3-part ciphertext");
  if (keys.backend != backend() ||
      keys.relin_key.b.size() != static_cast<size_t>(params().relin_digits())) {
    throw ContractError("relinearization key missing or mismatched");
  }
  const uint32_t n = params().degree();
  const int w = params().relin_decomp_bits;
  const u128 mask = (u128(1) << w) - 1;
  const RingElem& c2 = c.part(2);
  std::vector<u128> whole(n);
  for (uint32_t i = 0; i < n; ++i) {
    whole[i] = Compose(c2.coeff(i, 0), limbs_ == 2 ? c2.coeff(i, 1) : 0);
  }
  RingElem acc0(params().ring, Domain::kEvaluation);
  RingElem acc1(params().ring, Domain::kEvaluation);
  for (int j = 0; j < params().relin_digits(); ++j) {
    RingElemBuilder digit(params().ring);
    for (uint32_t i = 0; i < n; ++i) {
      const uint64_t dv = static_cast<uint64_t>((whole[i] >> (w * j)) & mask);
      for (size_t k = 0; k < limbs_; ++k) digit.Set(i, k, params().ring.modulus(k).Reduce(dv));
    }
    const RingElem dn = ring::NttForward(std::move(digit).Build());
    acc0 = acc0 + ring::PointwiseMul(dn, keys.relin_key.b[j]);
    acc1 = acc1 + ring::PointwiseMul(dn, keys.relin_key.a[j]);
  }
  return Ciphertext({c.part(0) + ring::NttInverse(acc0), c.part(1) + ring::NttInverse(acc1)},
                    noise().AfterRelin(c.noise_estimate()), backend());
}

}  // namespace sectrain::he
