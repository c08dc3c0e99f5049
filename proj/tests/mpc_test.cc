#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <functional>
#include <thread>

#include "sectrain/common/errors.h"
#include "sectrain/mpc/nonlinear.h"
#include "sectrain/mpc/share.h"
#include "sectrain/transport/memory_channel.h"

namespace sectrain::mpc {
namespace {

using transport::Endpoint;
using transport::MakeMemoryChannel;

double ChiSquaredP(const std::vector<uint64_t>& counts, double expected) {
  double stat = 0;
  for (uint64_t c : counts) stat += (double(c) - expected) * (double(c) - expected) / expected;
  boost::math::chi_squared dist(double(counts.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

// Runs f0 on this thread as party 0 and f1 on a second thread as party 1.
template <typename R0, typename R1>
std::pair<R0, R1> RunParties(const std::function<R0(Party&)>& f0,
                             const std::function<R1(Party&)>& f1, int bits,
                             uint64_t seed = 1, transport::CommReport* report = nullptr) {
  auto [a, b] = MakeMemoryChannel();
  R1 r1;
  std::thread t([&, ch = b.get()] {
    Party p(1, *ch, seed, seed + 100, bits);
    r1 = f1(p);
  });
  Party p(0, *a, seed, seed + 200, bits);
  R0 r0 = f0(p);
  t.join();
  if (report) *report = a->report();
  return {std::move(r0), std::move(r1)};
}

using U64s = std::vector<uint64_t>;
using Bits = std::vector<uint8_t>;

TEST(Share, WorkedExample) {
  const Share s0{200, 0, 8};
  const Share s1{(7 - 200) & 0xff, 1, 8};
  EXPECT_EQ(s1.value, 63u);
  EXPECT_EQ(Reconstruct(s0, s1), 7u);
}

TEST(Share, RoundTripAndZero) {
  Prng rng(4);
  for (int bits : {8, 16, 32, 63, 64}) {
    for (int i = 0; i < 200; ++i) {
      const uint64_t x = rng.Bits(bits);
      auto [a, b] = ShareValue(x, bits, rng);
      EXPECT_EQ(Reconstruct(a, b), x);
      auto [z0, z1] = ShareValue(0, bits, rng);
      EXPECT_EQ((z0.value + z1.value) & RingMask(bits), 0u);
    }
  }
}

TEST(Share, Errors) {
  Prng rng(1);
  EXPECT_THROW(ShareValue(1, 7, rng), ParameterError);
  EXPECT_THROW(ShareValue(1, 65, rng), ParameterError);
  EXPECT_THROW(Reconstruct(Share{1, 0, 8}, Share{1, 1, 16}), ParameterError);
  EXPECT_THROW(Reconstruct(Share{1, 0, 8}, Share{1, 0, 8}), ParameterError);
}

TEST(Share, FirstShareUniform) {
  Prng rng(99);
  std::vector<uint64_t> counts(256);
  for (int i = 0; i < 100000; ++i) ++counts[ShareValue(42, 8, rng).first.value];
  const double p = ChiSquaredP(counts, 100000.0 / 256);
  std::printf("share chi-squared p = %.4f\n", p);
  EXPECT_GT(p, 0.001);
}

TEST(Share, SignedViews) {
  EXPECT_EQ(ToSigned(253, 8), -3);
  EXPECT_EQ(ToSigned(127, 8), 127);
  EXPECT_EQ(FromSigned(-3, 8), 253u);
  EXPECT_EQ(ToSigned(~uint64_t(0), 64), -1);
}

TEST(Ot, CotContract) {
  Prng rng(5);
  const int n = 10000;
  U64s x(n);
  Bits i(n);
  for (int j = 0; j < n; ++j) {
    x[j] = rng.Bits(8);
    i[j] = uint8_t(rng.Bits(1));
  }
  i[0] = 0;
  i[1] = 1;
  x[1] = 5;
  auto [r, got] = RunParties<U64s, U64s>([&](Party& p) { return p.ot().CotSend(x, 8); },
                                         [&](Party& p) { return p.ot().CotRecv(i, 8); }, 8);
  EXPECT_EQ(got[0], r[0]);
  EXPECT_EQ((got[1] - r[1]) & 0xff, 5u);
  for (int j = 0; j < n; ++j) ASSERT_EQ((got[j] - r[j]) & 0xff, i[j] * x[j]) << j;
}

TEST(Ot, CotSenderOutputUniform) {
  U64s x(50000, 7);
  Bits i(50000, 1);
  auto [r, got] = RunParties<U64s, U64s>([&](Party& p) { return p.ot().CotSend(x, 8); },
                                         [&](Party& p) { return p.ot().CotRecv(i, 8); }, 8, 3);
  std::vector<uint64_t> counts(256);
  for (uint64_t v : r) ++counts[v];
  EXPECT_GT(ChiSquaredP(counts, 50000.0 / 256), 0.001);
}

TEST(Ot, KotContract) {
  {
    U64s m = {11, 22};
    auto [_, got] = RunParties<int, U64s>(
        [&](Party& p) { p.ot().KotSend(m, 2, 8); return 0; },
        [&](Party& p) { return p.ot().KotRecv(Bits{1}, 2, 8); }, 8);
    EXPECT_EQ(got, U64s{22});
  }
  {
    U64s m(16, 77);
    auto [_, got] = RunParties<int, U64s>(
        [&](Party& p) { p.ot().KotSend(m, 16, 8); return 0; },
        [&](Party& p) { return p.ot().KotRecv(Bits{3}, 16, 8); }, 8);
    EXPECT_EQ(got, U64s{77});
  }
  Prng rng(8);
  const size_t n = 2000;
  U64s m(n * 16);
  Bits idx(n);
  for (auto& v : m) v = rng.Next();
  for (auto& v : idx) v = uint8_t(rng.Uniform(16));
  auto [_, got] = RunParties<int, U64s>(
      [&](Party& p) { p.ot().KotSend(m, 16, 64); return 0; },
      [&](Party& p) { return p.ot().KotRecv(idx, 16, 64); }, 32);
  for (size_t j = 0; j < n; ++j) ASSERT_EQ(got[j], m[j * 16 + idx[j]]);
}

TEST(Ot, IndexOutOfRange) {
  auto [a, b] = MakeMemoryChannel();
  OtEndpoint r(*b, 1);
  EXPECT_THROW(r.KotRecv(Bits{16}, 16, 8), ParameterError);
  EXPECT_THROW(r.CotRecv(Bits{2}, 8), ParameterError);
  EXPECT_THROW(r.KotRecv(Bits{0}, 1, 8), ParameterError);
}

TEST(Ot, DesynchronizedBatchesDetected) {
  auto [a, b] = MakeMemoryChannel();
  std::thread t([ch = b.get()] {
    OtEndpoint r(*ch, 1);
    EXPECT_THROW(r.CotRecv(Bits{0, 1, 1, 0}, 8), ProtocolError);
  });
  OtEndpoint s(*a, 1);
  EXPECT_THROW(s.CotSend(U64s{1, 2, 3}, 8), ProtocolError);
  a->SendError("desynchronized");
  t.join();

  // Kind mismatch: the receiver asks for a correlated OT, the sender runs k-OT.
  auto [c, d] = MakeMemoryChannel();
  std::thread t2([ch = d.get()] {
    OtEndpoint r(*ch, 1);
    EXPECT_THROW(r.CotRecv(Bits{1}, 8), ProtocolError);
  });
  OtEndpoint s2(*c, 1);
  EXPECT_THROW(s2.KotSend(U64s{1, 2}, 2, 8), ProtocolError);
  c->SendError("desynchronized");
  t2.join();
}

TEST(Ot, TranscriptsHideIndexAndOtherMessages) {
  Prng rng(21);
  const size_t n = 512;
  U64s m(n * 16);
  Bits idx(n);
  for (auto& v : m) v = rng.Next() | (uint64_t(1) << 63);
  for (auto& v : idx) v = uint8_t(rng.Uniform(16));
  auto [a, b] = MakeMemoryChannel();
  a->RecordTranscript(true);
  b->RecordTranscript(true);
  U64s got;
  std::thread t([&, ch = b.get()] { got = OtEndpoint(*ch, 9).KotRecv(idx, 16, 64); });
  OtEndpoint(*a, 9).KotSend(m, 16, 64);
  t.join();
  auto bytes_of = [](uint64_t v) {
    Bytes b(8);
    for (int i = 0; i < 8; ++i) b[i] = uint8_t(v >> (8 * i));
    return b;
  };
  int checked = 0;
  for (const auto& e : b->transcript()) {
    for (size_t j = 0; j < n; ++j) {
      for (int v = 0; v < 16; ++v) {
        ASSERT_FALSE(ContainsSubsequence(e.payload, bytes_of(m[j * 16 + v])));
        ++checked;
      }
    }
    // The index vector itself never appears in what the sender sees.
    if (e.outgoing) EXPECT_FALSE(ContainsSubsequence(e.payload, std::span(idx).first(8)));
  }
  EXPECT_GT(checked, 0);
  for (size_t j = 0; j < n; ++j) ASSERT_EQ(got[j], m[j * 16 + idx[j]]);
}

// Shares v (as a residue) between the parties with a fixed splitting seed.
std::pair<U64s, U64s> Split(const U64s& v, int bits, uint64_t seed) {
  Prng rng(seed);
  return ShareVector(v, bits, rng);
}

U64s Open(const U64s& a, const U64s& b, int bits) { return ReconstructVector(a, b, bits); }

Bits OpenBits(const Bits& a, const Bits& b) {
  Bits out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
  return out;
}

TEST(Nonlinear, BitTriplesAndAnd) {
  auto [t0, t1] = RunParties<BitTriples, BitTriples>(
      [](Party& p) { return MakeBitTriples(p, 5000); },
      [](Party& p) { return MakeBitTriples(p, 5000); }, 8);
  for (size_t i = 0; i < 5000; ++i) {
    ASSERT_EQ(t0.c[i] ^ t1.c[i], (t0.a[i] ^ t1.a[i]) & (t0.b[i] ^ t1.b[i]));
  }
  Bits x0 = {0, 0, 1, 1, 0, 1, 1, 0}, x1 = {0, 1, 0, 1, 1, 1, 0, 0};
  Bits y0 = {0, 0, 0, 0, 1, 1, 1, 1}, y1 = {0, 0, 1, 1, 0, 0, 1, 1};
  auto [z0, z1] = RunParties<Bits, Bits>(
      [&](Party& p) { return And(p, x0, y0, MakeBitTriples(p, 8), 0); },
      [&](Party& p) { return And(p, x1, y1, MakeBitTriples(p, 8), 0); }, 8);
  for (size_t i = 0; i < 8; ++i) EXPECT_EQ(z0[i] ^ z1[i], (x0[i] ^ x1[i]) & (y0[i] ^ y1[i]));
}

TEST(Nonlinear, MillionaireRandomWidths) {
  Prng rng(31);
  for (int w : {1, 3, 4, 5, 7, 8, 13, 31, 63}) {
    U64s a(300), b(300);
    for (size_t i = 0; i < a.size(); ++i) {
      a[i] = rng.Bits(w);
      b[i] = i % 5 == 0 ? a[i] : rng.Bits(w);
    }
    auto [s0, s1] = RunParties<Bits, Bits>([&](Party& p) { return Millionaire(p, a, w); },
                                           [&](Party& p) { return Millionaire(p, b, w); }, 64);
    for (size_t i = 0; i < a.size(); ++i) ASSERT_EQ(s0[i] ^ s1[i], a[i] < b[i] ? 1 : 0) << w;
  }
}

struct Outputs {
  Bits d;
  U64s relu;
};

Outputs RunDReluRelu(const U64s& x, int bits, uint64_t seed) {
  auto [x0, x1] = Split(x, bits, seed);
  auto f = [](const U64s& mine) {
    return [&mine](Party& p) {
      Outputs o;
      o.relu = Relu(p, mine, &o.d);
      return o;
    };
  };
  auto [o0, o1] = RunParties<Outputs, Outputs>(f(x0), f(x1), bits, seed);
  return {OpenBits(o0.d, o1.d), Open(o0.relu, o1.relu, bits)};
}

TEST(Nonlinear, ExhaustiveEightBit) {
  U64s x(256);
  for (int v = 0; v < 256; ++v) x[v] = uint64_t(v);
  for (uint64_t seed : {1, 2, 3}) {
    const auto out = RunDReluRelu(x, 8, seed);
    for (int v = 0; v < 256; ++v) {
      const int64_t s = ToSigned(uint64_t(v), 8);
      ASSERT_EQ(out.d[v], s >= 0 ? 1 : 0) << v;
      ASSERT_EQ(out.relu[v], FromSigned(std::max<int64_t>(s, 0), 8)) << v;
    }
  }
  EXPECT_EQ(RunDReluRelu({5}, 8, 4).d[0], 1);
  EXPECT_EQ(RunDReluRelu({253}, 8, 4).d[0], 0);
}

TEST(Nonlinear, RandomThirtyTwoBit) {
  Prng rng(77);
  U64s x(10000);
  for (auto& v : x) v = rng.Bits(32);
  x[0] = 0;
  x[1] = 0x80000000u;
  x[2] = 0x7fffffffu;
  x[3] = 0xffffffffu;
  const auto out = RunDReluRelu(x, 32, 11);
  for (size_t i = 0; i < x.size(); ++i) {
    const int64_t s = ToSigned(x[i], 32);
    ASSERT_EQ(out.d[i], s >= 0 ? 1 : 0) << i;
    ASSERT_EQ(out.relu[i], FromSigned(std::max<int64_t>(s, 0), 32)) << i;
  }
}

U64s RunMaxPool(const U64s& x, int window, int bits, uint64_t seed) {
  auto [x0, x1] = Split(x, bits, seed);
  auto f = [window](const U64s& mine) { return [&mine, window](Party& p) { return MaxPool(p, mine, window); }; };
  auto [m0, m1] = RunParties<U64s, U64s>(f(x0), f(x1), bits, seed);
  return Open(m0, m1, bits);
}

U64s PlainMax(const U64s& x, int window, int bits) {
  U64s out;
  for (size_t i = 0; i < x.size(); i += window) {
    int64_t best = ToSigned(x[i], bits);
    for (int j = 1; j < window; ++j) best = std::max(best, ToSigned(x[i + j], bits));
    out.push_back(FromSigned(best, bits));
  }
  return out;
}

TEST(Nonlinear, MaxPoolExamples) {
  EXPECT_EQ(RunMaxPool({1, 9, 3, 7}, 4, 32, 1), U64s{9});
  U64s neg = {FromSigned(-5, 32), FromSigned(-2, 32), FromSigned(-9, 32), FromSigned(-3, 32)};
  EXPECT_EQ(RunMaxPool(neg, 4, 32, 1), U64s{FromSigned(-2, 32)});
  EXPECT_EQ(RunMaxPool({4, 8, 1}, 3, 16, 1), U64s{8});
  EXPECT_EQ(RunMaxPool({4}, 1, 16, 1), U64s{4});
}

TEST(Nonlinear, MaxPoolExhaustiveEightBit) {
  // Every ordered pair in the range where differences do not wrap.
  U64s x;
  for (int a = -64; a < 64; ++a) {
    for (int b = -64; b < 64; ++b) {
      x.push_back(FromSigned(a, 8));
      x.push_back(FromSigned(b, 8));
    }
  }
  EXPECT_EQ(RunMaxPool(x, 2, 8, 5), PlainMax(x, 2, 8));
  Prng rng(6);
  U64s y(4 * 2000);
  for (auto& v : y) v = FromSigned(int64_t(rng.Uniform(128)) - 64, 8);
  EXPECT_EQ(RunMaxPool(y, 4, 8, 6), PlainMax(y, 4, 8));
}

TEST(Nonlinear, MaxPoolRandomThirtyTwoBit) {
  Prng rng(7);
  U64s x(4 * 10000);
  for (auto& v : x) v = FromSigned(int64_t(rng.Bits(31)) - (int64_t(1) << 30), 32);
  EXPECT_EQ(RunMaxPool(x, 4, 32, 7), PlainMax(x, 4, 32));
  U64s y(16 * 16, 0);
  for (auto& v : y) v = FromSigned(int64_t(rng.Uniform(2000)) - 1000, 16);
  EXPECT_EQ(RunMaxPool(y, 16, 16, 7), PlainMax(y, 16, 16));
}

TEST(Nonlinear, MaxPoolBackwardRoutesToLeftmostMax) {
  Prng rng(12);
  for (int window : {2, 3, 4, 5, 9}) {
    const size_t n = 300;
    U64s x(n * window), g(n);
    for (auto& v : x) v = FromSigned(int64_t(rng.Uniform(7)) - 3, 16);  // many ties
    for (auto& v : g) v = rng.Bits(16);
    auto [x0, x1] = Split(x, 16, 3);
    auto [g0, g1] = Split(g, 16, 4);
    auto f = [window](const U64s& xs, const U64s& gs) {
      return [&, window](Party& p) {
        MaxPoolTrace trace;
        MaxPool(p, xs, window, &trace);
        return MaxPoolBackward(p, trace, gs);
      };
    };
    auto [d0, d1] = RunParties<U64s, U64s>(f(x0, g0), f(x1, g1), 16, 9);
    const U64s dx = Open(d0, d1, 16);
    for (size_t e = 0; e < n; ++e) {
      size_t arg = 0;
      for (int j = 1; j < window; ++j) {
        if (ToSigned(x[e * window + j], 16) > ToSigned(x[e * window + arg], 16)) arg = size_t(j);
      }
      for (int j = 0; j < window; ++j) {
        ASSERT_EQ(dx[e * window + j], size_t(j) == arg ? g[e] : 0u) << window << " " << e;
      }
    }
  }
}

TEST(Nonlinear, MuxSelects) {
  Prng rng(13);
  const size_t n = 1000;
  U64s x(n);
  Bits d0(n), d1(n);
  for (size_t i = 0; i < n; ++i) {
    x[i] = rng.Bits(32);
    d0[i] = uint8_t(rng.Bits(1));
    d1[i] = uint8_t(rng.Bits(1));
  }
  auto [x0, x1] = Split(x, 32, 2);
  auto [y0, y1] = RunParties<U64s, U64s>([&](Party& p) { return Mux(p, d0, x0); },
                                         [&](Party& p) { return Mux(p, d1, x1); }, 32);
  const U64s y = Open(y0, y1, 32);
  for (size_t i = 0; i < n; ++i) ASSERT_EQ(y[i], (d0[i] ^ d1[i]) ? x[i] : 0u);
}

TEST(Nonlinear, ReluCommunicationPerElement) {
  auto bytes_for = [](size_t n) {
    U64s x(n, 3);
    auto [x0, x1] = Split(x, 32, 1);
    transport::CommReport report;
    RunParties<U64s, U64s>([&](Party& p) { return Relu(p, x0); },
                           [&](Party& p) { return Relu(p, x1); }, 32, 1, &report);
    return report.total_bytes(Phase::kNonlinear);
  };
  const uint64_t b1 = bytes_for(1000), b2 = bytes_for(2000), b4 = bytes_for(4000);
  std::printf("ReLU bytes per element at 32 bits: %.2f\n", double(b4 - b2) / 2000);
  EXPECT_EQ(b4 - b2, 2 * (b2 - b1));
}

}  // namespace
}  // namespace sectrain::mpc
