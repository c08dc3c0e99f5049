#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <vector>

#include "sectrain/common/errors.h"
#include "sectrain/he/evaluator.h"

namespace sectrain::he {
namespace {

using ring::RingElem;

const HeParams& Params4096() {
  static const HeParams p = HeParams::Default(4096);
  return p;
}

RingElem RandomPlain(const HeParams& p, Prng& rng) {
  std::vector<uint64_t> v(p.degree());
  for (auto& x : v) x = rng.Uniform(p.plain_modulus());
  return RingElem::FromCoeffs(p.plain, v);
}

class HeBackendTest : public ::testing::TestWithParam<Backend> {
 protected:
  HeBackendTest()
      : scheme_(MakeScheme(GetParam(), Params4096())),
        eval_(scheme_, scheme_->KeyGen(11), &meter_, 12) {}

  const HeParams& params() const { return Params4096(); }

  std::shared_ptr<const Scheme> scheme_;
  OpMeter meter_;
  Evaluator eval_;
};

TEST_P(HeBackendTest, ZeroRoundTrip) {
  RingElem zero(params().plain);
  EXPECT_EQ(eval_.Decrypt(eval_.Encrypt(zero)), zero);
}

TEST_P(HeBackendTest, RandomRoundTrip) {
  Prng rng(1);
  for (int i = 0; i < 3; ++i) {
    auto m = RandomPlain(params(), rng);
    EXPECT_EQ(eval_.Decrypt(eval_.Encrypt(m)), m);
  }
}

TEST_P(HeBackendTest, AddDoubles) {
  Prng rng(2);
  auto m = RandomPlain(params(), rng);
  auto c = eval_.Encrypt(m);
  EXPECT_EQ(eval_.Decrypt(eval_.CcAdd(c, c)), m + m);
}

TEST_P(HeBackendTest, AddMatchesPlainSum) {
  Prng rng(3);
  auto a = RandomPlain(params(), rng), b = RandomPlain(params(), rng);
  EXPECT_EQ(eval_.Decrypt(eval_.CcAdd(eval_.Encrypt(a), eval_.Encrypt(b))), a + b);
  auto zero = eval_.Encrypt(RingElem(params().plain));
  EXPECT_EQ(eval_.Decrypt(eval_.CcAdd(eval_.Encrypt(a), zero)), a);
}

TEST_P(HeBackendTest, CpMulIdentityAndNegacyclic) {
  Prng rng(4);
  auto m = RandomPlain(params(), rng);
  auto one = RingElem::Constant(params().plain, 1);
  EXPECT_EQ(eval_.Decrypt(eval_.CpMul(eval_.Encrypt(m), one)), m);

  auto x = RingElem::Monomial(params().plain, 1);
  auto xn1 = RingElem::Monomial(params().plain, params().degree() - 1);
  EXPECT_EQ(eval_.Decrypt(eval_.CpMul(eval_.Encrypt(x), xn1)),
            RingElem::Constant(params().plain, -1));
}

TEST_P(HeBackendTest, CpMulMatchesRingProduct) {
  Prng rng(5);
  for (int i = 0; i < 2; ++i) {
    auto m = RandomPlain(params(), rng), pt = RandomPlain(params(), rng);
    EXPECT_EQ(eval_.Decrypt(eval_.CpMul(eval_.Encrypt(m), pt)), m * pt);
  }
}

TEST_P(HeBackendTest, CcMulByOneAndRandom) {
  Prng rng(6);
  auto a = RandomPlain(params(), rng);
  auto one = eval_.Encrypt(RingElem::Constant(params().plain, 1));
  EXPECT_EQ(eval_.Decrypt(eval_.CcMul(eval_.Encrypt(a), one)), a);
  for (int i = 0; i < 2; ++i) {
    auto x = RandomPlain(params(), rng), y = RandomPlain(params(), rng);
    EXPECT_EQ(eval_.Decrypt(eval_.CcMul(eval_.Encrypt(x), eval_.Encrypt(y))), x * y);
  }
}

TEST_P(HeBackendTest, UnrelinearizedTensorDecrypts) {
  Prng rng(7);
  auto x = RandomPlain(params(), rng), y = RandomPlain(params(), rng);
  auto t = scheme_->Multiply(eval_.Encrypt(x), eval_.Encrypt(y));
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(eval_.Decrypt(t), x * y);
}

TEST_P(HeBackendTest, MaskedProductSum) {
  // Sum of two plaintext products and one ciphertext product, as the
  // precomputed linear layer does.
  Prng rng(8);
  auto x = RandomPlain(params(), rng), w = RandomPlain(params(), rng);
  auto rx = RandomPlain(params(), rng), rw = RandomPlain(params(), rng);
  auto rxrw = eval_.CcMul(eval_.Encrypt(rx), eval_.Encrypt(rw));
  auto c = eval_.CcAdd(eval_.CcAdd(eval_.CpMul(eval_.Encrypt(x), w - rw),
                                   eval_.CpMul(eval_.Encrypt(w), x - rx)),
                       rxrw);
  EXPECT_EQ(eval_.Decrypt(c) - eval_.PpMul(x - rx, w - rw), x * w);
}

TEST_P(HeBackendTest, MetersCountRelinOncePerCcMul) {
  Prng rng(9);
  auto a = eval_.Encrypt(RandomPlain(params(), rng));
  auto b = eval_.Encrypt(RandomPlain(params(), rng));
  meter_.Reset();
  eval_.CpMul(a, RandomPlain(params(), rng));
  EXPECT_EQ(meter_.count(OpKind::kRelin), 0u);
  EXPECT_EQ(meter_.count(OpKind::kCpMul), 1u);
  eval_.CcMul(a, b);
  EXPECT_EQ(meter_.count(OpKind::kRelin), 1u);
  EXPECT_EQ(meter_.count(OpKind::kCcMul), 1u);
  eval_.CcAdd(a, b);
  eval_.PpMul(RandomPlain(params(), rng), RandomPlain(params(), rng));
  EXPECT_EQ(meter_.count(OpKind::kCcAdd), 1u);
  EXPECT_EQ(meter_.count(OpKind::kPpMul), 1u);
  EXPECT_EQ(meter_.count(OpKind::kEnc), 0u);
}

TEST_P(HeBackendTest, ContractErrors) {
  Prng rng(10);
  auto a = eval_.Encrypt(RandomPlain(params(), rng));
  auto t = scheme_->Multiply(a, a);
  EXPECT_THROW(eval_.CpMul(t, RandomPlain(params(), rng)), ContractError);
  EXPECT_THROW(eval_.CcMul(t, a), ContractError);
  EXPECT_THROW(eval_.CcAdd(t, a), ContractError);
  EXPECT_THROW(scheme_->Relinearize(a, eval_.keys()), ContractError);
  auto wrong = RingElem(params().ring);
  EXPECT_THROW(eval_.Encrypt(wrong), ParameterError);
}

TEST_P(HeBackendTest, NoiseOverflowRaises) {
  Prng rng(11);
  auto a = eval_.Encrypt(RandomPlain(params(), rng));
  auto sq = eval_.CcMul(a, a);
  EXPECT_THROW(eval_.Decrypt(eval_.CcMul(sq, sq)), DecryptionFailure);
  EXPECT_THROW(eval_.Decrypt(eval_.CpMul(sq, RandomPlain(params(), rng))), DecryptionFailure);
}

TEST_P(HeBackendTest, DecryptNeedsSecret) {
  Evaluator server(scheme_, eval_.keys().PublicOnly(), nullptr, 1);
  auto c = server.Encrypt(RingElem::Constant(params().plain, 3));
  EXPECT_THROW(server.Decrypt(c), ContractError);
  EXPECT_EQ(eval_.Decrypt(c), RingElem::Constant(params().plain, 3));
}

TEST_P(HeBackendTest, CiphertextWireRoundTrip) {
  Prng rng(12);
  auto m = RandomPlain(params(), rng);
  auto c = eval_.Encrypt(m);
  ByteWriter w;
  Serialize(c, w);
  EXPECT_EQ(w.size(), 1 + 2 * ring::SerializedSize(scheme_->cipher_ring()));
  ByteReader r(w.bytes());
  auto back = eval_.ReadCiphertext(r, scheme_->FreshNoise());
  EXPECT_TRUE(r.done());
  EXPECT_EQ(eval_.Decrypt(back), m);
}

INSTANTIATE_TEST_SUITE_P(Backends, HeBackendTest,
                         ::testing::Values(Backend::kTransparent, Backend::kRlwe),
                         [](const auto& info) { return std::string(BackendName(info.param)); });

TEST(HeSmallTest, ConstantProductModSeventeen) {
  auto params = HeParams::Create(16, ring::FindNttPrimes(60, 32, 2), 17);
  for (Backend b : {Backend::kTransparent, Backend::kRlwe}) {
    auto scheme = MakeScheme(b, params);
    Evaluator eval(scheme, scheme->KeyGen(3), nullptr, 4);
    auto c = eval.CcMul(eval.Encrypt(RingElem::Constant(params.plain, 3)),
                        eval.Encrypt(RingElem::Constant(params.plain, 5)));
    EXPECT_EQ(eval.Decrypt(c), RingElem::Constant(params.plain, 15));
  }
}

TEST(HeSmallTest, SingleLimbModulus) {
  auto params = HeParams::Create(64, ring::FindNttPrimes(60, 128, 1), 257);
  auto scheme = MakeScheme(Backend::kRlwe, params);
  Evaluator eval(scheme, scheme->KeyGen(5), nullptr, 6);
  Prng rng(13);
  for (int i = 0; i < 5; ++i) {
    auto x = RandomPlain(params, rng), y = RandomPlain(params, rng);
    EXPECT_EQ(eval.Decrypt(eval.CpMul(eval.Encrypt(x), y)), x * y);
  }
}

TEST(HeSmallTest, BackendsAgreeOnOperationSequence) {
  auto params = HeParams::Default(1024);
  auto clear = MakeScheme(Backend::kTransparent, params);
  auto rlwe = MakeScheme(Backend::kRlwe, params);
  Evaluator ec(clear, clear->KeyGen(1), nullptr, 2);
  Evaluator er(rlwe, rlwe->KeyGen(1), nullptr, 2);
  Prng rng(14);
  for (int i = 0; i < 4; ++i) {
    auto a = RandomPlain(params, rng), b = RandomPlain(params, rng), p = RandomPlain(params, rng);
    auto run = [&](Evaluator& e) {
      auto ca = e.Encrypt(a), cb = e.Encrypt(b);
      auto c = e.CcAdd(e.CcMul(ca, cb), e.CpMul(ca, p));
      return std::pair(e.Decrypt(c), c.noise_estimate());
    };
    auto [mc, nc] = run(ec);
    auto [mr, nr] = run(er);
    EXPECT_EQ(mc, mr);
    EXPECT_EQ(nc, nr);
  }
}

TEST(HeKeyTest, KeyGenIsDeterministic) {
  auto params = HeParams::Default(1024);
  auto scheme = MakeScheme(Backend::kRlwe, params);
  auto k1 = scheme->KeyGen(42), k2 = scheme->KeyGen(42), k3 = scheme->KeyGen(43);
  ByteWriter w1, w2, w3;
  SerializePublic(k1, w1);
  SerializePublic(k2, w2);
  SerializePublic(k3, w3);
  EXPECT_EQ(w1.bytes(), w2.bytes());
  EXPECT_NE(w1.bytes(), w3.bytes());
  EXPECT_EQ(k1.secret->s, k2.secret->s);
}

TEST(HeKeyTest, PublicKeyTransferExcludesSecret) {
  auto params = HeParams::Default(1024);
  auto scheme = MakeScheme(Backend::kRlwe, params);
  auto keys = scheme->KeyGen(7);
  ByteWriter pub;
  SerializePublic(keys, pub);
  ByteWriter sk;
  ring::Serialize(keys.secret->s, sk);
  EXPECT_FALSE(ContainsSubsequence(pub.bytes(), std::span(sk.bytes()).subspan(5, 64)));

  ByteReader r(pub.bytes());
  auto received = DeserializePublic(r, scheme->cipher_ring());
  EXPECT_FALSE(received.has_secret());
  Evaluator server(scheme, received, nullptr, 8);
  Evaluator client(scheme, keys, nullptr, 9);
  Prng rng(15);
  auto x = RandomPlain(params, rng), y = RandomPlain(params, rng);
  auto c = server.CcMul(server.Encrypt(x), client.Encrypt(y));
  EXPECT_EQ(client.Decrypt(c), x * y);
}

TEST(HeParamsTest, RejectsIncompatibleModuli) {
  auto q = ring::FindNttPrimes(60, 64, 2);
  EXPECT_THROW(HeParams::Create(32, q, q[0]), ParameterError);
  EXPECT_THROW(HeParams::Create(32, {17}, 5), ParameterError);
  EXPECT_THROW(HeParams::Create(32, q, uint64_t(1) << 58), ParameterError);
  EXPECT_THROW(HeParams::Create(32, q, 17, 3.2, 0), ParameterError);
}

TEST(HeCostTest, CcMulAtLeastTwiceCpMul) {
  auto scheme = MakeScheme(Backend::kRlwe, Params4096());
  Evaluator eval(scheme, scheme->KeyGen(1), nullptr, 2);
  Prng rng(16);
  auto a = eval.Encrypt(RandomPlain(Params4096(), rng));
  auto b = eval.Encrypt(RandomPlain(Params4096(), rng));
  auto pt = RandomPlain(Params4096(), rng);
  std::vector<double> cc, cp;
  for (int i = 0; i < 100; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    auto x = eval.CcMul(a, b);
    auto t1 = std::chrono::steady_clock::now();
    auto y = eval.CpMul(a, pt);
    auto t2 = std::chrono::steady_clock::now();
    cc.push_back(std::chrono::duration<double>(t1 - t0).count());
    cp.push_back(std::chrono::duration<double>(t2 - t1).count());
  }
  std::ranges::nth_element(cc, cc.begin() + 50);
  std::ranges::nth_element(cp, cp.begin() + 50);
  const double ratio = cc[50] / cp[50];
  RecordProperty("ccmul_cpmul_ratio", std::to_string(ratio));
  std::printf("median ccmul %.3f ms, cpmul %.3f ms, ratio %.2f\n", cc[50] * 1e3, cp[50] * 1e3,
              ratio);
  EXPECT_GE(ratio, 2.0);
}

}  // namespace
}  // namespace sectrain::he
