#include "sectrain/linprot/pool.h"

#include <fstream>
#include <iterator>

#include "sectrain/common/errors.h"
#include "wire.h"

namespace sectrain::linprot {

namespace {

constexpr uint32_t kPoolMagic = 0x4c505453;  // "STPL"
constexpr uint32_t kMaskMagic = 0x4b4d5453;  // "STMK"

std::string Key(uint32_t layer, uint32_t seq) {
  return "layer " + std::to_string(layer) + " mask " + std::to_string(seq);
}

void WriteFile(const std::string& path, const Bytes& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!f) throw Error("cannot write " + path);
}

Bytes ReadFile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(f), {});
}

template <typename M>
size_t CountAvailable(const M& m, const uint32_t* layer) {
  size_t n = 0;
  for (const auto& [k, v] : m) {
    if (!v.consumed && (layer == nullptr || k.first == *layer)) ++n;
  }
  return n;
}

}  // namespace

void TriplePool::Add(MaskPair pair) {
  const auto key = std::make_pair(pair.layer, pair.seq);
  if (pairs_.count(key)) throw ParameterError("duplicate " + Key(pair.layer, pair.seq));
  pairs_.emplace(key, std::move(pair));
}

MaskPair TriplePool::Consume(uint32_t layer, uint32_t seq) {
  auto it = pairs_.find({layer, seq});
  if (it == pairs_.end()) throw PrecomputeMissing("no precomputed " + Key(layer, seq));
  if (it->second.consumed) throw SingleUseViolation(Key(layer, seq) + " was already used");
  MaskPair out = std::move(it->second);
  it->second = MaskPair{layer, seq, out.shape, {}, {}, {}, true};
  out.consumed = true;
  return out;
}

const MaskPair* TriplePool::Find(uint32_t layer, uint32_t seq) const {
  auto it = pairs_.find({layer, seq});
  return it == pairs_.end() ? nullptr : &it->second;
}

size_t TriplePool::available(uint32_t layer) const { return CountAvailable(pairs_, &layer); }
size_t TriplePool::available() const { return CountAvailable(pairs_, nullptr); }

void TriplePool::Save(const std::string& path) const {
  ByteWriter out;
  out.PutU32(kPoolMagic);
  out.PutU32(static_cast<uint32_t>(pairs_.size()));
  for (const auto& [key, p] : pairs_) {
    out.PutU32(p.layer);
    out.PutU32(p.seq);
    out.PutU8(p.consumed ? 1 : 0);
    Serialize(p.shape, out);
    if (p.consumed) continue;
    for (const auto* list : {&p.enc_left, &p.enc_right, &p.products}) {
      for (const auto& c : *list) wire::PutCipher(out, c);
    }
  }
  WriteFile(path, out.bytes());
}

TriplePool TriplePool::Load(const std::string& path, const he::Scheme& scheme) {
  const Bytes bytes = ReadFile(path);
  ByteReader in(bytes);
  if (in.GetU32() != kPoolMagic) throw SerializationError(path + " is not a mask pool file");
  TriplePool pool;
  const uint32_t n = in.GetU32();
  for (uint32_t k = 0; k < n; ++k) {
    MaskPair p;
    p.layer = in.GetU32();
    p.seq = in.GetU32();
    p.consumed = in.GetU8() != 0;
    p.shape = DeserializeJobShape(in);
    if (!p.consumed) {
      for (uint32_t i = 0; i < p.shape.left; ++i) p.enc_left.push_back(wire::GetCipher(in, scheme));
      for (uint32_t i = 0; i < p.shape.right; ++i) p.enc_right.push_back(wire::GetCipher(in, scheme));
      for (size_t i = 0; i < p.shape.num_products(); ++i) p.products.push_back(wire::GetCipher(in, scheme));
    }
    pool.Add(std::move(p));
  }
  in.ExpectDone("mask pool file");
  return pool;
}

uint32_t ClientMaskStore::NextSeq(uint32_t layer) const {
  auto it = masks_.lower_bound({layer + 1, 0});
  if (it == masks_.begin()) return 0;
  --it;
  return it->first.first == layer ? it->first.second + 1 : 0;
}

void ClientMaskStore::Add(ClientMask mask) {
  const auto key = std::make_pair(mask.layer, mask.seq);
  if (masks_.count(key)) throw ParameterError("duplicate " + Key(mask.layer, mask.seq));
  masks_.emplace(key, std::move(mask));
}

ClientMask ClientMaskStore::TakeNext(uint32_t layer) {
  for (auto it = masks_.lower_bound({layer, 0}); it != masks_.end() && it->first.first == layer; ++it) {
    if (!it->second.consumed) return Take(layer, it->first.second);
  }
  throw PrecomputeMissing("no precomputed mask left for layer " + std::to_string(layer));
}

ClientMask ClientMaskStore::Take(uint32_t layer, uint32_t seq) {
  auto it = masks_.find({layer, seq});
  if (it == masks_.end()) throw PrecomputeMissing("no precomputed " + Key(layer, seq));
  if (it->second.consumed) throw SingleUseViolation(Key(layer, seq) + " was already used");
  ClientMask out = std::move(it->second);
  it->second = ClientMask{layer, seq, out.shape, {}, {}, true};
  out.consumed = true;
  return out;
}

size_t ClientMaskStore::available(uint32_t layer) const { return CountAvailable(masks_, &layer); }
size_t ClientMaskStore::available() const { return CountAvailable(masks_, nullptr); }

void ClientMaskStore::Save(const std::string& path) const {
  ByteWriter out;
  out.PutU32(kMaskMagic);
  out.PutU32(static_cast<uint32_t>(masks_.size()));
  for (const auto& [key, m] : masks_) {
    out.PutU32(m.layer);
    out.PutU32(m.seq);
    out.PutU8(m.consumed ? 1 : 0);
    Serialize(m.shape, out);
    if (m.consumed) continue;
    for (const auto& r : m.r_left) ring::Serialize(r, out);
    for (const auto& r : m.r_right) ring::Serialize(r, out);
  }
  WriteFile(path, out.bytes());
}

ClientMaskStore ClientMaskStore::Load(const std::string& path, const ring::RingParams& plain) {
  const Bytes bytes = ReadFile(path);
  ByteReader in(bytes);
  if (in.GetU32() != kMaskMagic) throw SerializationError(path + " is not a client mask file");
  ClientMaskStore store;
  const uint32_t n = in.GetU32();
  for (uint32_t k = 0; k < n; ++k) {
    ClientMask m;
    m.layer = in.GetU32();
    m.seq = in.GetU32();
    m.consumed = in.GetU8() != 0;
    m.shape = DeserializeJobShape(in);
    if (!m.consumed) {
      for (uint32_t i = 0; i < m.shape.left; ++i) m.r_left.push_back(ring::Deserialize(in, plain));
      for (uint32_t i = 0; i < m.shape.right; ++i) m.r_right.push_back(ring::Deserialize(in, plain));
    }
    store.Add(std::move(m));
  }
  in.ExpectDone("client mask file");
  return store;
}

}  // namespace sectrain::linprot
