#include <gtest/gtest.h>

#include <cstdint>
#include <vector>

#include "sectrain/common/errors.h"
#include "sectrain/common/prng.h"
#include "sectrain/ring/modulus.h"
#include "sectrain/ring/ring.h"

namespace sectrain::ring {
namespace {

// Independent negacyclic product over plain 128-bit arithmetic.
std::vector<uint64_t> NaiveNegacyclic(const std::vector<uint64_t>& a,
                                      const std::vector<uint64_t>& b, uint64_t p) {
  const size_t n = a.size();
  std::vector<unsigned __int128> acc(n, 0);
  std::vector<bool> unused(n);
  std::vector<uint64_t> out(n, 0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      const uint64_t prod = static_cast<uint64_t>((unsigned __int128)a[i] * b[j] % p);
      const size_t d = (i + j) % n;
      if (i + j < n) {
        out[d] = static_cast<uint64_t>(((unsigned __int128)out[d] + prod) % p);
      } else {
        out[d] = static_cast<uint64_t>(((unsigned __int128)out[d] + p - prod) % p);
      }
    }
  }
  return out;
}

std::vector<uint64_t> RandomCoeffs(Prng& rng, uint32_t n, uint64_t p) {
  std::vector<uint64_t> v(n);
  for (auto& x : v) x = rng.Uniform(p);
  return v;
}

uint64_t NttPrime(uint32_t n, int bits = 40) { return FindNttPrimes(bits, 2 * uint64_t(n), 1)[0]; }

std::vector<uint64_t> Coeffs(const RingElem& e) {
  return {e.limb(0).begin(), e.limb(0).end()};
}

TEST(ModulusTest, BarrettMatchesNativeRemainder) {
  Prng rng(1);
  for (uint64_t p : {uint64_t(17), uint64_t(65537), NttPrime(4096, 37), NttPrime(4096, 60),
                     (uint64_t(1) << 61) - 1}) {
    Modulus m(p);
    for (int i = 0; i < 2000; ++i) {
      const uint64_t a = rng.Uniform(p), b = rng.Uniform(p);
      EXPECT_EQ(m.Mul(a, b), static_cast<uint64_t>((unsigned __int128)a * b % p));
    }
  }
}

TEST(ModulusTest, RejectsOutOfRange) {
  EXPECT_THROW(Modulus(1), ParameterError);
  EXPECT_THROW(Modulus(uint64_t(1) << 62), ParameterError);
}

TEST(ModulusTest, SignedConversionsRoundTrip) {
  Modulus m(17);
  EXPECT_EQ(m.FromSigned(-1), 16u);
  EXPECT_EQ(m.FromSigned(INT64_MIN), m.Neg(static_cast<uint64_t>(
                                         (unsigned __int128)(uint64_t(1) << 63) % 17)));
  EXPECT_EQ(m.ToSigned(16), -1);
  EXPECT_EQ(m.ToSigned(8), 8);
  EXPECT_EQ(m.ToSigned(9), -8);
}

TEST(ModulusTest, NttPrimesAreCongruent) {
  auto primes = FindNttPrimes(60, 8192, 3);
  ASSERT_EQ(primes.size(), 3u);
  for (uint64_t p : primes) {
    EXPECT_TRUE(IsPrime(p));
    EXPECT_EQ(p % 8192, 1u);
    EXPECT_LT(p, uint64_t(1) << 60);
  }
  EXPECT_GT(primes[0], primes[1]);
}

TEST(RingParamsTest, Validation) {
  EXPECT_THROW(RingParams::Create(6, 17), ParameterError);
  EXPECT_THROW(RingParams::Create(8, std::vector<uint64_t>{}), ParameterError);
  EXPECT_THROW(RingParams::Create(8, std::vector<uint64_t>{17, 17}), ParameterError);
  EXPECT_TRUE(RingParams::Create(4, 17).ntt_enabled());
  EXPECT_FALSE(RingParams::Create(4096, 17).ntt_enabled());
}

TEST(RingAddTest, ModularWrap) {
  auto params = RingParams::Create(4, 17);
  std::vector<uint64_t> a{1, 2, 3, 4}, b{16, 16, 16, 16};
  auto sum = RingElem::FromCoeffs(params, a) + RingElem::FromCoeffs(params, b);
  EXPECT_EQ(Coeffs(sum), (std::vector<uint64_t>{0, 1, 2, 3}));
}

TEST(RingAddTest, IdentityAndCommutativity) {
  auto params = RingParams::Create(64, NttPrime(64));
  Prng rng(2);
  const uint64_t p = params.modulus().value();
  auto a = RingElem::FromCoeffs(params, RandomCoeffs(rng, 64, p));
  auto b = RingElem::FromCoeffs(params, RandomCoeffs(rng, 64, p));
  EXPECT_EQ(RingElem(params) + b, b);
  EXPECT_EQ(a + b, b + a);
  EXPECT_EQ((a - b) + b, a);
}

TEST(RingAddTest, ParamsMismatchThrows) {
  auto a = RingElem(RingParams::Create(4, 17));
  auto b = RingElem(RingParams::Create(4, 97));
  EXPECT_THROW(a + b, ParameterError);
  EXPECT_THROW(a * b, ParameterError);
}

TEST(RingMulTest, NegacyclicWrap) {
  auto params = RingParams::Create(4, 17);
  auto x3 = RingElem::Monomial(params, 3);
  auto x1 = RingElem::Monomial(params, 1);
  EXPECT_EQ(Coeffs(x3 * x1), (std::vector<uint64_t>{16, 0, 0, 0}));
  EXPECT_EQ(Coeffs(MulSchoolbook(x3, x1)), (std::vector<uint64_t>{16, 0, 0, 0}));
}

TEST(RingMulTest, MultiplicativeIdentity) {
  auto params = RingParams::Create(32, NttPrime(32));
  Prng rng(3);
  auto b = RingElem::FromCoeffs(params, RandomCoeffs(rng, 32, params.modulus().value()));
  EXPECT_EQ(RingElem::Constant(params, 1) * b, b);
}

TEST(RingMulTest, NttMatchesSchoolbookAtN8) {
  auto params = RingParams::Create(8, 17);
  ASSERT_TRUE(params.ntt_enabled());
  Prng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    auto av = RandomCoeffs(rng, 8, 17), bv = RandomCoeffs(rng, 8, 17);
    auto a = RingElem::FromCoeffs(params, av), b = RingElem::FromCoeffs(params, bv);
    EXPECT_EQ(Coeffs(a * b), NaiveNegacyclic(av, bv, 17));
    EXPECT_EQ(a * b, MulSchoolbook(a, b));
  }
}

TEST(RingMulTest, NttMatchesSchoolbookExhaustiveSparse) {
  for (uint32_t n : {4u, 8u, 16u, 32u}) {
    auto params = RingParams::Create(n, NttPrime(n));
    const uint64_t p = params.modulus().value();
    Prng rng(n);
    for (uint32_t i = 0; i < n; ++i) {
      for (uint32_t j = 0; j < n; ++j) {
        std::vector<uint64_t> av(n, 0), bv(n, 0);
        av[i] = rng.Uniform(p);
        bv[j] = rng.Uniform(p);
        auto a = RingElem::FromCoeffs(params, av), b = RingElem::FromCoeffs(params, bv);
        ASSERT_EQ(Coeffs(a * b), NaiveNegacyclic(av, bv, p)) << "n=" << n << " i=" << i << " j=" << j;
      }
    }
  }
}

TEST(RingMulTest, NttMatchesSchoolbookAtN4096) {
  auto params = RingParams::Create(4096, NttPrime(4096, 37));
  Prng rng(5);
  const uint64_t p = params.modulus().value();
  for (int trial = 0; trial < 2; ++trial) {
    auto a = RingElem::FromCoeffs(params, RandomCoeffs(rng, 4096, p));
    auto b = RingElem::FromCoeffs(params, RandomCoeffs(rng, 4096, p));
    EXPECT_EQ(a * b, MulSchoolbook(a, b));
  }
}

TEST(RingMulTest, NonNttModulusUsesSchoolbook) {
  auto params = RingParams::Create(16, 1000003);  // prime, but 1000003 % 32 != 1
  ASSERT_FALSE(params.ntt_enabled());
  Prng rng(6);
  auto av = RandomCoeffs(rng, 16, 1000003), bv = RandomCoeffs(rng, 16, 1000003);
  auto prod = RingElem::FromCoeffs(params, av) * RingElem::FromCoeffs(params, bv);
  EXPECT_EQ(Coeffs(prod), NaiveNegacyclic(av, bv, 1000003));
}

TEST(RingPropertyTest, RingAxiomsOnRandomTriples) {
  auto params = RingParams::Create(128, NttPrime(128));
  const uint64_t p = params.modulus().value();
  Prng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = RingElem::FromCoeffs(params, RandomCoeffs(rng, 128, p));
    auto b = RingElem::FromCoeffs(params, RandomCoeffs(rng, 128, p));
    auto c = RingElem::FromCoeffs(params, RandomCoeffs(rng, 128, p));
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a * b, b * a);
  }
}

TEST(RingPropertyTest, MonomialMultiplicationIsSignedRotation) {
  const uint32_t n = 32;
  auto params = RingParams::Create(n, NttPrime(n));
  const Modulus& m = params.modulus();
  Prng rng(8);
  auto av = RandomCoeffs(rng, n, m.value());
  auto a = RingElem::FromCoeffs(params, av);
  for (uint32_t k = 0; k < n; ++k) {
    std::vector<uint64_t> expect(n);
    for (uint32_t i = 0; i < n; ++i) {
      const uint32_t d = i + k;
      if (d < n) expect[d] = av[i];
      else expect[d - n] = m.Neg(av[i]);
    }
    EXPECT_EQ(Coeffs(a * RingElem::Monomial(params, k)), expect) << "k=" << k;
  }
}

TEST(RingMulTest, TwoLimbRingMatchesPerLimbRings) {
  const uint32_t n = 64;
  auto primes = FindNttPrimes(50, 2 * n, 2);
  auto both = RingParams::Create(n, primes);
  auto first = RingParams::Create(n, primes[0]);
  auto second = RingParams::Create(n, primes[1]);
  Prng rng(9);
  std::vector<int64_t> av(n), bv(n);
  for (auto& v : av) v = static_cast<int64_t>(rng.Uniform(2001)) - 1000;
  for (auto& v : bv) v = static_cast<int64_t>(rng.Uniform(2001)) - 1000;
  auto prod = RingElem::FromSigned(both, av) * RingElem::FromSigned(both, bv);
  auto p0 = RingElem::FromSigned(first, av) * RingElem::FromSigned(first, bv);
  auto p1 = RingElem::FromSigned(second, av) * RingElem::FromSigned(second, bv);
  EXPECT_TRUE(std::equal(prod.limb(0).begin(), prod.limb(0).end(), p0.limb(0).begin()));
  EXPECT_TRUE(std::equal(prod.limb(1).begin(), prod.limb(1).end(), p1.limb(0).begin()));
}

TEST(NttTest, ZeroAndRoundTrip) {
  auto params = RingParams::Create(1024, NttPrime(1024));
  EXPECT_TRUE(NttForward(RingElem(params)).IsZero());
  Prng rng(10);
  auto a = RingElem::FromCoeffs(params, RandomCoeffs(rng, 1024, params.modulus().value()));
  auto eval = NttForward(a);
  EXPECT_EQ(eval.domain(), Domain::kEvaluation);
  EXPECT_EQ(NttInverse(eval), a);
}

TEST(NttTest, PointwiseProductIsRingProduct) {
  auto params = RingParams::Create(16, NttPrime(16));
  const uint64_t p = params.modulus().value();
  Prng rng(11);
  auto av = RandomCoeffs(rng, 16, p), bv = RandomCoeffs(rng, 16, p);
  auto a = RingElem::FromCoeffs(params, av), b = RingElem::FromCoeffs(params, bv);
  auto prod = NttInverse(PointwiseMul(NttForward(a), NttForward(b)));
  EXPECT_EQ(Coeffs(prod), NaiveNegacyclic(av, bv, p));
}

TEST(NttTest, RejectsUnfriendlyModulus) {
  auto a = RingElem(RingParams::Create(4096, 17));
  EXPECT_THROW(NttForward(a), ParameterError);
  auto small = RingParams::Create(4, 17);
  auto eval = NttForward(RingElem::Constant(small, 3));
  EXPECT_THROW(NttForward(eval), ParameterError);
  EXPECT_THROW(NttInverse(RingElem(small)), ParameterError);
  EXPECT_THROW(eval + RingElem(small), ParameterError);
  EXPECT_THROW(eval * eval, ParameterError);
}

TEST(SerializationTest, BitExactLayout) {
  auto params = RingParams::Create(2, std::vector<uint64_t>{17, 97});
  std::vector<uint64_t> limb_major{1, 2, 3, 0x60};
  auto a = RingElem::FromCoeffs(params, limb_major);
  ByteWriter w;
  Serialize(a, w);
  const Bytes expect{2, 0, 0, 0, 2,
                     1, 0, 0, 0, 0, 0, 0, 0,     // c0 limb0
                     3, 0, 0, 0, 0, 0, 0, 0,     // c0 limb1
                     2, 0, 0, 0, 0, 0, 0, 0,     // c1 limb0
                     0x60, 0, 0, 0, 0, 0, 0, 0}; // c1 limb1
  EXPECT_EQ(w.bytes(), expect);
  EXPECT_EQ(w.size(), SerializedSize(params));
}

TEST(SerializationTest, RoundTripAndHeaderCheck) {
  auto params = RingParams::Create(256, FindNttPrimes(55, 512, 2));
  Prng rng(12);
  std::vector<uint64_t> v(512);
  for (size_t i = 0; i < 512; ++i) v[i] = rng.Uniform(params.modulus(i / 256).value());
  auto a = RingElem::FromCoeffs(params, v);
  ByteWriter w;
  Serialize(a, w);
  ByteReader r(w.bytes());
  EXPECT_EQ(Deserialize(r, params), a);
  EXPECT_TRUE(r.done());

  ByteReader r2(w.bytes());
  EXPECT_THROW(Deserialize(r2, RingParams::Create(256, params.modulus(0).value())),
               SerializationError);
  ByteReader truncated(std::span<const uint8_t>(w.bytes()).first(100));
  EXPECT_THROW(Deserialize(truncated, params), SerializationError);
}

}  // namespace
}  // namespace sectrain::ring
