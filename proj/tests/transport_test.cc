#include <gtest/gtest.h>

#include <functional>
#include <numeric>
#include <thread>

#include "sectrain/common/errors.h"
#include "sectrain/common/prng.h"
#include "sectrain/transport/memory_channel.h"
#include "sectrain/transport/socket_channel.h"

namespace sectrain::transport {
namespace {

Bytes Fill(size_t n, uint8_t start) {
  Bytes b(n);
  std::iota(b.begin(), b.end(), start);
  return b;
}

TEST(Transport, EmptyFrameCostsHeader) {
  auto [c, s] = MakeMemoryChannel();
  c->Send(Phase::kOnline, {});
  EXPECT_TRUE(s->Recv(Phase::kOnline).empty());
  EXPECT_EQ(c->report().at(Phase::kOnline).bytes_sent, 5u);
  EXPECT_EQ(s->report().at(Phase::kOnline).bytes_received, 5u);
  EXPECT_EQ(c->report().total_bytes(), 5u);
}

TEST(Transport, FreshReportIsZero) {
  auto [c, s] = MakeMemoryChannel();
  for (const auto* e : {c.get(), s.get()}) {
    EXPECT_EQ(e->report().total_bytes(), 0u);
    EXPECT_EQ(e->report().rounds(), 0u);
  }
}

TEST(Transport, RoundTripTotal) {
  for (size_t n : {0u, 1u, 100u, 4096u}) {
    auto [c, s] = MakeMemoryChannel();
    c->Send(Phase::kOnline, Fill(n, 1));
    const Bytes got = s->Recv(Phase::kOnline);
    EXPECT_EQ(got, Fill(n, 1));
    s->Send(Phase::kOnline, got);
    EXPECT_EQ(c->Recv(Phase::kOnline), Fill(n, 1));
    EXPECT_EQ(c->report().total_bytes(), 2 * n + 10);
    EXPECT_EQ(s->report().total_bytes(), 2 * n + 10);
    EXPECT_EQ(c->report().rounds(), 1u);
  }
}

TEST(Transport, PerTagCounters) {
  auto [c, s] = MakeMemoryChannel();
  Prng rng(3);
  uint64_t expect[kPhaseCount] = {};
  std::vector<std::pair<Phase, Bytes>> sent;
  for (int i = 0; i < 40; ++i) {
    const Phase p = (i % 3 == 0) ? Phase::kOffline : Phase::kOnline;
    Bytes b = Fill(rng.Uniform(64), uint8_t(i));
    expect[int(p)] += b.size() + kFrameHeaderBytes;
    c->Send(p, b);
    sent.emplace_back(p, std::move(b));
  }
  for (const auto& [p, b] : sent) EXPECT_EQ(s->Recv(p), b);
  for (int p = 0; p < kPhaseCount; ++p) {
    EXPECT_EQ(c->report().phases[p].bytes_sent, expect[p]);
    EXPECT_EQ(s->report().phases[p].bytes_received, expect[p]);
  }
  EXPECT_EQ(c->report().rounds(), 0u);
}

TEST(Transport, RoundsCountAlternations) {
  auto [c, s] = MakeMemoryChannel();
  c->Send(Phase::kOffline, Fill(3, 0));
  c->Send(Phase::kOffline, Fill(3, 0));
  s->Recv(Phase::kOffline);
  s->Recv(Phase::kOffline);
  s->Send(Phase::kOnline, Fill(1, 0));
  c->Recv(Phase::kOnline);
  c->Send(Phase::kNonlinear, Fill(1, 0));
  s->Recv(Phase::kNonlinear);
  EXPECT_EQ(c->report().rounds(), 2u);
  EXPECT_EQ(c->report().at(Phase::kOnline).rounds, 1u);
  EXPECT_EQ(c->report().at(Phase::kNonlinear).rounds, 1u);
  c->ResetReport();
  EXPECT_EQ(c->report().total_bytes(), 0u);
}

TEST(Transport, TagMismatchIsProtocolError) {
  auto [c, s] = MakeMemoryChannel();
  c->Send(Phase::kOffline, Fill(4, 0));
  EXPECT_THROW(s->Recv(Phase::kOnline), ProtocolError);
}

TEST(Transport, ClosedChannel) {
  auto [c, s] = MakeMemoryChannel();
  c->Send(Phase::kOnline, Fill(2, 0));
  c->Close();
  EXPECT_EQ(s->Recv(Phase::kOnline), Fill(2, 0));
  EXPECT_THROW(s->Recv(Phase::kOnline), ChannelClosed);
  EXPECT_THROW(s->Send(Phase::kOnline, Fill(1, 0)), ChannelClosed);
}

TEST(Transport, ErrorFrame) {
  auto [c, s] = MakeMemoryChannel();
  s->SendError("bad layer");
  try {
    c->Recv(Phase::kOnline);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_NE(std::string(e.what()).find("bad layer"), std::string::npos);
  }
}

TEST(Transport, BlockingRecvAcrossThreads) {
  auto [c, s] = MakeMemoryChannel();
  std::thread t([&] {
    for (int i = 0; i < 200; ++i) {
      Bytes b = s->Recv(Phase::kOnline);
      s->Send(Phase::kOnline, b);
    }
  });
  for (int i = 0; i < 200; ++i) {
    c->Send(Phase::kOnline, Fill(i % 17, uint8_t(i)));
    EXPECT_EQ(c->Recv(Phase::kOnline), Fill(i % 17, uint8_t(i)));
  }
  t.join();
  EXPECT_EQ(c->report().rounds(), 399u);
}

TEST(Transport, LinkModelDelays) {
  LinkModel link{8.0, 20.0};  // 1 MB/s, 20 ms ping
  auto [c, s] = MakeMemoryChannel(link);
  const auto t0 = std::chrono::steady_clock::now();
  c->Send(Phase::kOnline, Fill(10000 - 5, 0));
  s->Recv(Phase::kOnline);
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_GE(dt, 0.01 + 0.01 - 1e-3);
  EXPECT_NEAR(link.TransferSeconds(1000000), 1.0, 1e-12);
  CommReport r = c->report();
  EXPECT_NEAR(ModeledNetworkSeconds(r, link), 0.01 + 0.01, 1e-9);
}

// A small deterministic exchange; the server answers each request with
// a PRNG-derived reply.
void RunProtocol(Endpoint& client, Endpoint& server, uint64_t seed) {
  std::thread st([&] {
    Prng rng(seed, {2});
    for (int i = 0; i < 10; ++i) {
      Bytes req = server.Recv(i < 5 ? Phase::kOffline : Phase::kOnline);
      for (auto& x : req) x ^= uint8_t(rng.Bits(8));
      server.Send(i < 5 ? Phase::kOffline : Phase::kOnline, req);
    }
  });
  Prng rng(seed, {1});
  for (int i = 0; i < 10; ++i) {
    Bytes req(rng.Uniform(300));
    for (auto& x : req) x = uint8_t(rng.Bits(8));
    client.Send(i < 5 ? Phase::kOffline : Phase::kOnline, req);
    client.Recv(i < 5 ? Phase::kOffline : Phase::kOnline);
  }
  st.join();
}

TEST(Transport, SocketMatchesMemoryTranscript) {
  auto [mc, ms] = MakeMemoryChannel();
  mc->RecordTranscript(true);
  ms->RecordTranscript(true);
  RunProtocol(*mc, *ms, 77);

  SocketListener listener(0);
  std::unique_ptr<Endpoint> sc;
  std::thread acceptor([&] { sc = listener.Accept(); });
  auto cc = ConnectSocket("127.0.0.1", listener.port());
  acceptor.join();
  cc->RecordTranscript(true);
  sc->RecordTranscript(true);
  RunProtocol(*cc, *sc, 77);

  const auto a = mc->transcript(), b = cc->transcript();
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].outgoing, b[i].outgoing);
    EXPECT_EQ(a[i].tag, b[i].tag);
    EXPECT_EQ(a[i].payload, b[i].payload);
  }
  EXPECT_EQ(ms->transcript().size(), sc->transcript().size());
  EXPECT_EQ(mc->report().total_bytes(), cc->report().total_bytes());
  EXPECT_EQ(mc->report().rounds(), cc->report().rounds());
}

TEST(Transport, SocketCloseAndErrors) {
  SocketListener listener(0);
  std::unique_ptr<Endpoint> sc;
  std::thread acceptor([&] { sc = listener.Accept(); });
  auto cc = ConnectSocket("127.0.0.1", listener.port());
  acceptor.join();
  cc->Send(Phase::kSetup, {});
  EXPECT_TRUE(sc->Recv(Phase::kSetup).empty());
  sc->SendError("nope");
  EXPECT_THROW(cc->Recv(Phase::kOnline), ProtocolError);
  cc->Send(Phase::kOnline, Fill(9, 0));
  EXPECT_THROW(sc->Recv(Phase::kOffline), ProtocolError);
  cc->Close();
  EXPECT_THROW(sc->Recv(Phase::kOnline), ChannelClosed);
}

TEST(Transport, Determinism) {
  std::vector<TranscriptEntry> first;
  for (int run = 0; run < 2; ++run) {
    auto [c, s] = MakeMemoryChannel();
    c->RecordTranscript(true);
    RunProtocol(*c, *s, 5);
    if (run == 0) {
      first = c->transcript();
    } else {
      ASSERT_EQ(first.size(), c->transcript().size());
      for (size_t i = 0; i < first.size(); ++i) EXPECT_EQ(first[i].payload, c->transcript()[i].payload);
    }
  }
}

}  // namespace
}  // namespace sectrain::transport
