#include "sectrain/mpc/nonlinear.h"

#include "sectrain/common/errors.h"
#include "sectrain/mpc/share.h"

namespace sectrain::mpc {

namespace {

constexpr uint64_t kPartyDomain = 0x7061727479;

Bytes PackBits(std::span<const uint8_t> bits) {
  std::vector<uint64_t> wide(bits.begin(), bits.end());
  ByteWriter out(PackedBitsSize(wide.size(), 1));
  out.PutPackedBits(wide, 1);
  return out.Take();
}

std::vector<uint8_t> UnpackBits(std::span<const uint8_t> bytes, size_t n) {
  ByteReader in(bytes);
  const auto wide = in.GetPackedBits(n, 1);
  in.ExpectDone("bit vector");
  return {wide.begin(), wide.end()};
}

}  // namespace

Party::Party(int id, transport::Endpoint& channel, uint64_t dealer_seed, uint64_t local_seed,
             int bits)
    : id_(id), bits_(bits), ot_(channel, dealer_seed), rng_(local_seed, {kPartyDomain, uint64_t(id)}) {
  if (id != 0 && id != 1) throw ParameterError("party id must be 0 or 1");
  CheckBits(bits);
}

uint64_t Party::mask() const { return RingMask(bits_); }

Bytes Party::Exchange(std::span<const uint8_t> mine) {
  if (id_ == 0) {
    channel().Send(phase(), mine);
    return channel().Recv(phase());
  }
  Bytes theirs = channel().Recv(phase());
  channel().Send(phase(), mine);
  return theirs;
}

BitTriples MakeBitTriples(Party& party, size_t n) {
  BitTriples t;
  t.a.resize(n);
  t.b.resize(n);
  t.c.resize(n);
  if (n == 0) return t;
  for (size_t i = 0; i < n; ++i) {
    t.a[i] = static_cast<uint8_t>(party.rng().Bits(1));
    t.b[i] = static_cast<uint8_t>(party.rng().Bits(1));
  }
  // Cross terms a0*b1 and a1*b0 via one bit-COT in each direction.
  std::vector<uint64_t> a_wide(t.a.begin(), t.a.end());
  std::vector<uint64_t> mine, theirs;
  if (party.id() == 0) {
    mine = party.ot().CotSend(a_wide, 1);
    theirs = party.ot().CotRecv(t.b, 1);
  } else {
    theirs = party.ot().CotRecv(t.b, 1);
    mine = party.ot().CotSend(a_wide, 1);
  }
  for (size_t i = 0; i < n; ++i) {
    t.c[i] = static_cast<uint8_t>((t.a[i] & t.b[i]) ^ mine[i] ^ theirs[i]);
  }
  return t;
}

std::vector<uint8_t> And(Party& party, std::span<const uint8_t> x, std::span<const uint8_t> y,
                         const BitTriples& triples, size_t offset) {
  const size_t n = x.size();
  if (y.size() != n) throw ParameterError("AND operands differ in length");
  if (offset + n > triples.a.size()) throw ParameterError("not enough bit triples");
  std::vector<uint8_t> ef(2 * n);
  for (size_t i = 0; i < n; ++i) {
    ef[i] = x[i] ^ triples.a[offset + i];
    ef[n + i] = y[i] ^ triples.b[offset + i];
  }
  const Bytes peer = party.Exchange(PackBits(ef));
  const auto other = UnpackBits(peer, 2 * n);
  std::vector<uint8_t> z(n);
  for (size_t i = 0; i < n; ++i) {
    const uint8_t e = ef[i] ^ other[i];
    const uint8_t f = ef[n + i] ^ other[n + i];
    z[i] = triples.c[offset + i] ^ (e & triples.b[offset + i]) ^ (f & triples.a[offset + i]);
    if (party.id() == 0) z[i] ^= e & f;
  }
  return z;
}

std::vector<uint8_t> Millionaire(Party& party, std::span<const uint64_t> input, int input_bits) {
  if (input_bits < 1 || input_bits > 64) throw ParameterError("comparison width must be in [1, 64]");
  constexpr int m = kMillionaireChunkBits;
  constexpr int k = 1 << m;
  const size_t n = input.size();
  const size_t q = size_t(input_bits + m - 1) / m;
  const uint64_t in_mask = RingMask(input_bits);

  // Leaf comparisons, chunk j of element e at e * q + j.
  std::vector<uint8_t> lt(n * q), eq(n * q);
  if (party.id() == 0) {
    std::vector<uint64_t> msgs(n * q * k);
    for (size_t e = 0; e < n; ++e) {
      const uint64_t a = input[e] & in_mask;
      for (size_t j = 0; j < q; ++j) {
        const uint64_t aj = (a >> (m * j)) & (k - 1);
        const auto r_lt = static_cast<uint8_t>(party.rng().Bits(1));
        const auto r_eq = static_cast<uint8_t>(party.rng().Bits(1));
        lt[e * q + j] = r_lt;
        eq[e * q + j] = r_eq;
        for (uint64_t v = 0; v < uint64_t(k); ++v) {
          msgs[(e * q + j) * k + v] = uint64_t((aj < v) ^ r_lt) | (uint64_t((aj == v) ^ r_eq) << 1);
        }
      }
    }
    party.ot().KotSend(msgs, k, 2);
  } else {
    std::vector<uint8_t> idx(n * q);
    for (size_t e = 0; e < n; ++e) {
      const uint64_t b = input[e] & in_mask;
      for (size_t j = 0; j < q; ++j) idx[e * q + j] = static_cast<uint8_t>((b >> (m * j)) & (k - 1));
    }
    const auto got = party.ot().KotRecv(idx, k, 2);
    for (size_t i = 0; i < got.size(); ++i) {
      lt[i] = got[i] & 1;
      eq[i] = (got[i] >> 1) & 1;
    }
  }

  const BitTriples triples = MakeBitTriples(party, n * 2 * (q - 1));
  size_t used = 0;
  size_t width = q;
  while (width > 1) {
    const size_t pairs = width / 2;
    const size_t next = pairs + width % 2;
    std::vector<uint8_t> x(2 * n * pairs), y(2 * n * pairs);
    for (size_t e = 0; e < n; ++e) {
      for (size_t t = 0; t < pairs; ++t) {
        const size_t hi = e * width + 2 * t + 1, lo = e * width + 2 * t;
        x[e * pairs + t] = eq[hi];
        y[e * pairs + t] = lt[lo];
        x[n * pairs + e * pairs + t] = eq[hi];
        y[n * pairs + e * pairs + t] = eq[lo];
      }
    }
    const auto z = And(party, x, y, triples, used);
    used += z.size();
    std::vector<uint8_t> lt2(n * next), eq2(n * next);
    for (size_t e = 0; e < n; ++e) {
      for (size_t t = 0; t < pairs; ++t) {
        lt2[e * next + t] = lt[e * width + 2 * t + 1] ^ z[e * pairs + t];
        eq2[e * next + t] = z[n * pairs + e * pairs + t];
      }
      if (width % 2) {
        lt2[e * next + pairs] = lt[e * width + width - 1];
        eq2[e * next + pairs] = eq[e * width + width - 1];
      }
    }
    lt = std::move(lt2);
    eq = std::move(eq2);
    width = next;
  }
  return lt;
}

std::vector<uint8_t> DRelu(Party& party, std::span<const uint64_t> x) {
  const int l = party.bits();
  if (l < 2) throw ParameterError("DReLU needs at least 2 bits");
  const uint64_t low = RingMask(l - 1);
  std::vector<uint64_t> cmp(x.size());
  std::vector<uint8_t> msb(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const uint64_t v = x[i] & party.mask();
    msb[i] = static_cast<uint8_t>(v >> (l - 1));
    // The carry out of the low bits is 1{low - x0 < x1}.
    cmp[i] = party.id() == 0 ? low - (v & low) : v & low;
  }
  auto bits = Millionaire(party, cmp, l - 1);
  for (size_t i = 0; i < x.size(); ++i) {
    bits[i] ^= msb[i];
    if (party.id() == 0) bits[i] ^= 1;
  }
  return bits;
}

std::vector<uint64_t> Mux(Party& party, std::span<const uint8_t> d, std::span<const uint64_t> x) {
  const size_t n = x.size();
  if (d.size() != n) throw ParameterError("mux operands differ in length");
  const uint64_t m = party.mask();
  std::vector<uint64_t> corr(n);
  for (size_t i = 0; i < n; ++i) corr[i] = (d[i] ? 0 - x[i] : x[i]) & m;
  std::vector<uint64_t> sent, got;
  if (party.id() == 0) {
    sent = party.ot().CotSend(corr, party.bits());
    got = party.ot().CotRecv(d, party.bits());
  } else {
    got = party.ot().CotRecv(d, party.bits());
    sent = party.ot().CotSend(corr, party.bits());
  }
  std::vector<uint64_t> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = ((d[i] ? x[i] : 0) - sent[i] + got[i]) & m;
  return out;
}

std::vector<uint64_t> Relu(Party& party, std::span<const uint64_t> x, std::vector<uint8_t>* drelu) {
  auto d = DRelu(party, x);
  auto y = Mux(party, d, x);
  if (drelu) *drelu = std::move(d);
  return y;
}

std::vector<uint64_t> MaxPool(Party& party, std::span<const uint64_t> x, int window,
                              MaxPoolTrace* trace) {
  if (window < 1 || x.size() % size_t(window) != 0) {
    throw ParameterError("input is not a whole number of windows");
  }
  const size_t n = x.size() / size_t(window);
  const uint64_t m = party.mask();
  std::vector<uint64_t> cur(x.begin(), x.end());
  size_t width = size_t(window);
  if (trace) *trace = MaxPoolTrace{window, n, {}};
  while (width > 1) {
    const size_t pairs = width / 2;
    const size_t next = pairs + width % 2;
    std::vector<uint64_t> diff(n * pairs);
    for (size_t e = 0; e < n; ++e) {
      for (size_t t = 0; t < pairs; ++t) {
        diff[e * pairs + t] = (cur[e * width + 2 * t] - cur[e * width + 2 * t + 1]) & m;
      }
    }
    auto d = DRelu(party, diff);
    const auto sel = Mux(party, d, diff);
    std::vector<uint64_t> out(n * next);
    for (size_t e = 0; e < n; ++e) {
      for (size_t t = 0; t < pairs; ++t) {
        out[e * next + t] = (cur[e * width + 2 * t + 1] + sel[e * pairs + t]) & m;
      }
      if (width % 2) out[e * next + pairs] = cur[e * width + width - 1];
    }
    if (trace) trace->levels.push_back(std::move(d));
    cur = std::move(out);
    width = next;
  }
  return cur;
}

std::vector<uint64_t> MaxPoolBackward(Party& party, const MaxPoolTrace& trace,
                                      std::span<const uint64_t> grad) {
  const size_t n = trace.count;
  if (grad.size() != n) throw ParameterError("gradient does not match the pooled output");
  const uint64_t m = party.mask();
  std::vector<size_t> widths;
  for (size_t w = size_t(trace.window); w > 1; w = w / 2 + w % 2) widths.push_back(w);
  if (widths.size() != trace.levels.size()) throw ParameterError("malformed max-pool trace");

  std::vector<uint64_t> g(grad.begin(), grad.end());
  for (size_t l = widths.size(); l-- > 0;) {
    const size_t width = widths[l];
    const size_t pairs = width / 2;
    const size_t next = pairs + width % 2;
    std::vector<uint64_t> up(n * pairs);
    for (size_t e = 0; e < n; ++e) {
      for (size_t t = 0; t < pairs; ++t) up[e * pairs + t] = g[e * next + t];
    }
    const auto ga = Mux(party, trace.levels[l], up);
    std::vector<uint64_t> down(n * width);
    for (size_t e = 0; e < n; ++e) {
      for (size_t t = 0; t < pairs; ++t) {
        down[e * width + 2 * t] = ga[e * pairs + t];
        down[e * width + 2 * t + 1] = (up[e * pairs + t] - ga[e * pairs + t]) & m;
      }
      if (width % 2) down[e * width + width - 1] = g[e * next + pairs];
    }
    g = std::move(down);
  }
  return g;
}

}  // namespace sectrain::mpc
