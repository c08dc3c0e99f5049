#include "sectrain/mpc/ot.h"

#include <string>

#include "sectrain/common/errors.h"
#include "sectrain/common/prng.h"
#include "sectrain/mpc/share.h"

namespace sectrain::mpc {

namespace {

constexpr uint64_t kDealerDomain = 0x6f74646561;

// Random OTs from the dealer. The receiver's call passes no `all` buffer and
// receives only its choice and the chosen message.
void Deal(uint64_t seed, uint8_t kind, uint32_t batch, size_t n, int k, int bits,
          std::vector<uint64_t>* all, std::vector<uint8_t>* choice,
          std::vector<uint64_t>* chosen, std::vector<uint8_t>* pads, size_t pad_bytes) {
  Prng rng(seed, {kDealerDomain, kind, batch});
  if (all) all->resize(n * size_t(k));
  if (choice) choice->resize(n);
  if (chosen) chosen->resize(n);
  pads->resize(n * pad_bytes);
  std::vector<uint64_t> row(k);
  for (size_t j = 0; j < n; ++j) {
    for (int v = 0; v < k; ++v) row[v] = rng.Bits(bits);
    const auto c = static_cast<uint8_t>(rng.Uniform(k));
    for (size_t b = 0; b < pad_bytes; b += 8) {
      const uint64_t w = rng.Next();
      for (size_t t = 0; t < 8 && b + t < pad_bytes; ++t) {
        (*pads)[j * pad_bytes + b + t] = static_cast<uint8_t>(w >> (8 * t));
      }
    }
    if (all) std::copy(row.begin(), row.end(), all->begin() + j * k);
    if (choice) (*choice)[j] = c;
    if (chosen) (*chosen)[j] = row[c];
  }
}

}  // namespace

OtEndpoint::OtEndpoint(transport::Endpoint& channel, uint64_t dealer_seed, Phase phase)
    : channel_(channel), dealer_seed_(dealer_seed), phase_(phase) {}

void OtEndpoint::CheckHeader(ByteReader& in, Kind kind, size_t n, int k, int bits) {
  const uint8_t got_kind = in.GetU8();
  const uint32_t got_batch = in.GetU32();
  const uint32_t got_n = in.GetU32();
  const int got_k = int(in.GetU8()) + 1;
  const int got_bits = in.GetU8();
  if (got_kind != kind || got_batch != batch_ || got_n != n || got_k != k || got_bits != bits) {
    throw ProtocolError("OT desynchronized at batch " + std::to_string(batch_) +
                        " (peer batch " + std::to_string(got_batch) + ")");
  }
}

namespace {

void PutHeader(ByteWriter& out, uint8_t kind, uint32_t batch, size_t n, int k, int bits) {
  out.PutU8(kind);
  out.PutU32(batch);
  out.PutU32(static_cast<uint32_t>(n));
  out.PutU8(static_cast<uint8_t>(k - 1));
  out.PutU8(static_cast<uint8_t>(bits));
}

}  // namespace

std::vector<uint64_t> OtEndpoint::CotSend(std::span<const uint64_t> correlation, int bits) {
  CheckBits(bits);
  const size_t n = correlation.size();
  const uint64_t m = RingMask(bits);
  std::vector<uint64_t> all;
  std::vector<uint8_t> pads;
  Deal(dealer_seed_, kCot, batch_, n, 2, bits, &all, nullptr, nullptr, &pads, kCotRequestBytes);

  const Bytes request = channel_.Recv(phase_);
  ByteReader in(request);
  CheckHeader(in, kCot, n, 2, bits);
  auto blocks = in.GetBytes(n * kCotRequestBytes);
  in.ExpectDone("COT request");

  std::vector<uint64_t> r(n), u(n);
  for (size_t j = 0; j < n; ++j) {
    const uint8_t d = (blocks[j * kCotRequestBytes] ^ pads[j * kCotRequestBytes]) & 1;
    r[j] = all[2 * j + d];
    u[j] = (all[2 * j + (1 - d)] - r[j] - correlation[j]) & m;
  }
  ByteWriter out(PackedBitsSize(n, bits));
  out.PutPackedBits(u, bits);
  channel_.Send(phase_, out.bytes());
  ++batch_;
  invocations_ += n;
  return r;
}

std::vector<uint64_t> OtEndpoint::CotRecv(std::span<const uint8_t> choice, int bits) {
  CheckBits(bits);
  const size_t n = choice.size();
  const uint64_t m = RingMask(bits);
  std::vector<uint8_t> c, pads;
  std::vector<uint64_t> rc;
  Deal(dealer_seed_, kCot, batch_, n, 2, bits, nullptr, &c, &rc, &pads, kCotRequestBytes);

  ByteWriter out(kBatchHeaderBytes + n * kCotRequestBytes);
  PutHeader(out, kCot, batch_, n, 2, bits);
  for (size_t j = 0; j < n; ++j) {
    if (choice[j] > 1) throw ParameterError("COT choice must be a bit");
    pads[j * kCotRequestBytes] ^= choice[j] ^ c[j];
  }
  out.PutBytes(pads);
  channel_.Send(phase_, out.bytes());

  const Bytes reply = channel_.Recv(phase_);
  ByteReader in(reply);
  const auto u = in.GetPackedBits(n, bits);
  in.ExpectDone("COT reply");
  std::vector<uint64_t> res(n);
  for (size_t j = 0; j < n; ++j) res[j] = choice[j] ? (rc[j] - u[j]) & m : rc[j];
  ++batch_;
  invocations_ += n;
  return res;
}

void OtEndpoint::KotSend(std::span<const uint64_t> messages, int k, int bits) {
  CheckBits(bits);
  if (k < 2 || k > 256) throw ParameterError("k-OT needs 2 <= k <= 256");
  if (messages.size() % size_t(k) != 0) throw ParameterError("message count is not a multiple of k");
  const size_t n = messages.size() / size_t(k);
  const uint64_t m = RingMask(bits);
  std::vector<uint64_t> all;
  std::vector<uint8_t> pads;
  Deal(dealer_seed_, kKot, batch_, n, k, bits, &all, nullptr, nullptr, &pads, kKotRequestBytes);

  const Bytes request = channel_.Recv(phase_);
  ByteReader in(request);
  CheckHeader(in, kKot, n, k, bits);
  auto blocks = in.GetBytes(n * kKotRequestBytes);
  in.ExpectDone("k-OT request");

  std::vector<uint64_t> e(n * size_t(k));
  for (size_t j = 0; j < n; ++j) {
    const int d = blocks[j * kKotRequestBytes] ^ pads[j * kKotRequestBytes];
    if (d >= k) throw ProtocolError("k-OT request out of range");
    for (int v = 0; v < k; ++v) {
      e[j * k + v] = (messages[j * k + v] & m) ^ all[j * k + (v - d + k) % k];
    }
  }
  ByteWriter out(PackedBitsSize(e.size(), bits));
  out.PutPackedBits(e, bits);
  channel_.Send(phase_, out.bytes());
  ++batch_;
  invocations_ += n;
}

std::vector<uint64_t> OtEndpoint::KotRecv(std::span<const uint8_t> index, int k, int bits) {
  CheckBits(bits);
  if (k < 2 || k > 256) throw ParameterError("k-OT needs 2 <= k <= 256");
  const size_t n = index.size();
  std::vector<uint8_t> c, pads;
  std::vector<uint64_t> rc;
  Deal(dealer_seed_, kKot, batch_, n, k, bits, nullptr, &c, &rc, &pads, kKotRequestBytes);

  ByteWriter out(kBatchHeaderBytes + n * kKotRequestBytes);
  PutHeader(out, kKot, batch_, n, k, bits);
  for (size_t j = 0; j < n; ++j) {
    if (index[j] >= k) throw ParameterError("k-OT index out of range");
    pads[j * kKotRequestBytes] ^= static_cast<uint8_t>((index[j] - c[j] + k) % k);
  }
  out.PutBytes(pads);
  channel_.Send(phase_, out.bytes());

  const Bytes reply = channel_.Recv(phase_);
  ByteReader in(reply);
  const auto e = in.GetPackedBits(n * size_t(k), bits);
  in.ExpectDone("k-OT reply");
  std::vector<uint64_t> res(n);
  for (size_t j = 0; j < n; ++j) res[j] = e[j * k + index[j]] ^ rc[j];
  ++batch_;
  invocations_ += n;
  return res;
}

}  // namespace sectrain::mpc
