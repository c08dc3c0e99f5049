#include "sectrain/linprot/client.h"

#include <string>

#include "sectrain/common/errors.h"
#include "sectrain/he/keys.h"
#include "sectrain/mpc/share.h"
#include "wire.h"

namespace sectrain::linprot {

using wire::Op;

std::string_view ProtocolName(Protocol p) { return p == Protocol::kDirect ? "b" : "precompute"; }

Protocol ParseProtocol(std::string_view name) {
  if (name == "b" || name == "direct") return Protocol::kDirect;
  if (name == "precompute") return Protocol::kPrecompute;
  throw ParameterError("unknown protocol '" + std::string(name) + "'");
}

namespace {

constexpr uint64_t kMaskDomain = 0x6d61736b;

ring::RingElem UniformPlain(const ring::RingParams& plain, Prng& rng) {
  ring::RingElemBuilder b(plain);
  auto limb = b.limb(0);
  const uint64_t t = plain.modulus().value();
  for (auto& c : limb) c = rng.Uniform(t);
  return std::move(b).Build();
}

}  // namespace

Client::Client(transport::Endpoint& channel, std::shared_ptr<const he::Scheme> scheme,
               he::KeySet keys, ClientConfig config, he::OpMeter* meter)
    : channel_(channel),
      scheme_(scheme),
      config_(config),
      meter_(meter),
      eval_(scheme, std::move(keys), meter, config.seed),
      rng_(config.seed, {kMaskDomain}),
      party_(1, channel, config.dealer_seed, config.seed, config.share_bits) {
  if (!eval_.keys().has_secret()) throw ParameterError("the client needs the secret key");
}

void Client::SetPhase(Phase p) {
  if (meter_) meter_->set_phase(p);
}

Bytes Client::Recv(Phase p) {
  try {
    return channel_.Recv(p);
  } catch (const ProtocolError& e) {
    const std::string msg = e.what();
    if (msg.find("peer error: PrecomputeMissing") == 0) throw PrecomputeMissing(msg);
    if (msg.find("peer error: SingleUseViolation") == 0) throw SingleUseViolation(msg);
    throw;
  }
}

void Client::Setup() {
  ByteWriter out;
  out.PutU8(uint8_t(Op::kKeys));
  he::SerializePublic(eval_.keys(), out);
  channel_.Send(Phase::kSetup, out.bytes());
}

void Client::Finish() {
  const uint8_t op = uint8_t(Op::kFinish);
  channel_.Send(Phase::kSetup, std::span(&op, 1));
}

void Client::SyncOffline() {
  const uint8_t op = uint8_t(Op::kSync);
  channel_.Send(Phase::kOffline, std::span(&op, 1));
  const Bytes ack = Recv(Phase::kOffline);
  if (ack.size() != 1 || ack[0] != op) throw ProtocolError("bad sync reply");
}

std::vector<ring::RingElem> Client::LinearB(const LinearJob& job) {
  job.Validate();
  SetPhase(Phase::kOnline);
  ByteWriter out;
  out.PutU8(uint8_t(Op::kLinearB));
  Serialize(job.shape, out);
  for (const auto* list : {&job.left, &job.right}) {
    for (const auto& p : *list) wire::PutCipher(out, eval_.Encrypt(p));
  }
  channel_.Send(Phase::kOnline, out.bytes());

  const Bytes reply = Recv(Phase::kOnline);
  ByteReader in(reply);
  std::vector<ring::RingElem> result;
  for (size_t k = 0; k < job.shape.outputs.size(); ++k) {
    result.push_back(eval_.Decrypt(wire::GetCipher(in, *scheme_)));
  }
  in.ExpectDone("linear reply");
  return result;
}

void Client::Offline(uint32_t layer, const JobShape& shape, size_t count) {
  std::vector<std::pair<std::vector<ring::RingElem>, std::vector<ring::RingElem>>> masks(count);
  const auto& plain = scheme_->params().plain;
  for (auto& [l, r] : masks) {
    for (uint32_t i = 0; i < shape.left; ++i) l.push_back(UniformPlain(plain, rng_));
    for (uint32_t i = 0; i < shape.right; ++i) r.push_back(UniformPlain(plain, rng_));
  }
  Offline(layer, shape, std::move(masks));
}

void Client::Offline(
    uint32_t layer, const JobShape& shape,
    std::vector<std::pair<std::vector<ring::RingElem>, std::vector<ring::RingElem>>> masks) {
  shape.Validate();
  if (masks.empty()) return;
  SetPhase(Phase::kOffline);
  const uint32_t first = masks_.NextSeq(layer);
  ByteWriter out;
  out.PutU8(uint8_t(Op::kOffline));
  out.PutU32(layer);
  out.PutU32(first);
  out.PutU32(static_cast<uint32_t>(masks.size()));
  Serialize(shape, out);
  for (auto& [l, r] : masks) {
    if (l.size() != shape.left || r.size() != shape.right) {
      throw ParameterError("mask counts do not match the job shape");
    }
    for (const auto& p : l) wire::PutCipher(out, eval_.Encrypt(p));
    for (const auto& p : r) wire::PutCipher(out, eval_.Encrypt(p));
  }
  uint32_t seq = first;
  for (auto& [l, r] : masks) masks_.Add(ClientMask{layer, seq++, shape, std::move(l), std::move(r), false});
  channel_.Send(Phase::kOffline, out.bytes());
  SetPhase(Phase::kOnline);
}

std::vector<ring::RingElem> Client::PrecomputeOnline(uint32_t layer, const LinearJob& job) {
  return PrecomputeOnline(masks_.TakeNext(layer), job);
}

std::vector<ring::RingElem> Client::PrecomputeOnline(const ClientMask& mask, const LinearJob& job) {
  job.Validate();
  if (!(mask.shape == job.shape) || mask.r_left.size() != job.left.size() ||
      mask.r_right.size() != job.right.size()) {
    throw ParameterError("mask does not match the job shape");
  }
  SetPhase(Phase::kOnline);
  ByteWriter out;
  out.PutU8(uint8_t(Op::kOnline));
  out.PutU32(mask.layer);
  out.PutU32(mask.seq);
  Serialize(job.shape, out);
  for (const auto* list : {&job.left, &job.right}) {
    for (const auto& p : *list) wire::PutCipher(out, eval_.Encrypt(p));
  }
  for (size_t i = 0; i < job.left.size(); ++i) wire::PutPlain(out, job.left[i] - mask.r_left[i]);
  for (size_t j = 0; j < job.right.size(); ++j) wire::PutPlain(out, job.right[j] - mask.r_right[j]);
  channel_.Send(Phase::kOnline, out.bytes());

  const Bytes reply = Recv(Phase::kOnline);
  ByteReader in(reply);
  const auto& plain = scheme_->params().plain;
  std::vector<ring::RingElem> c;
  for (size_t k = 0; k < job.shape.outputs.size(); ++k) c.push_back(eval_.Decrypt(wire::GetCipher(in, *scheme_)));
  std::vector<ring::RingElem> result;
  for (size_t k = 0; k < job.shape.outputs.size(); ++k) result.push_back(c[k] - wire::GetPlain(in, plain));
  in.ExpectDone("precompute reply");
  return result;
}

std::vector<ring::RingElem> Client::Run(Protocol protocol, uint32_t layer, const LinearJob& job) {
  return protocol == Protocol::kDirect ? LinearB(job) : PrecomputeOnline(layer, job);
}

std::vector<uint64_t> Client::ShareOut(std::span<const int64_t> x, uint8_t op, uint32_t handle,
                                       const std::vector<uint32_t>& extra) {
  const int bits = config_.share_bits;
  const int64_t limit = bits >= 64 ? INT64_MAX : (int64_t(1) << (bits - 1));
  std::vector<uint64_t> mine(x.size()), theirs(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (bits < 64 && (x[i] >= limit || x[i] < -limit)) {
      throw OverflowError("value " + std::to_string(x[i]) + " does not fit " + std::to_string(bits) +
                          " signed bits");
    }
    mine[i] = party_.rng().Bits(bits);
    theirs[i] = (mpc::FromSigned(x[i], bits) - mine[i]) & party_.mask();
  }
  ByteWriter out;
  out.PutU8(op);
  out.PutU32(handle);
  for (uint32_t e : extra) out.PutU32(e);
  wire::PutShares(out, theirs, bits);
  channel_.Send(Phase::kNonlinear, out.bytes());
  return mine;
}

std::vector<int64_t> Client::Open(std::span<const uint64_t> mine) {
  const Bytes reply = Recv(Phase::kNonlinear);
  ByteReader in(reply);
  const auto theirs = wire::GetShares(in, config_.share_bits);
  in.ExpectDone("share reply");
  if (theirs.size() != mine.size()) throw ProtocolError("share reply has the wrong length");
  std::vector<int64_t> out(mine.size());
  for (size_t i = 0; i < mine.size(); ++i) {
    out[i] = mpc::ToSigned(mine[i] + theirs[i], config_.share_bits);
  }
  return out;
}

std::vector<int64_t> Client::Relu(std::span<const int64_t> x, uint32_t* handle) {
  const uint32_t h = handle ? next_handle_++ : wire::kNoHandle;
  const auto mine = ShareOut(x, uint8_t(Op::kRelu), h, {});
  std::vector<uint8_t> bits;
  const auto y = mpc::Relu(party_, mine, handle ? &bits : nullptr);
  if (handle) {
    relu_bits_[h] = std::move(bits);
    *handle = h;
  }
  return Open(y);
}

std::vector<int64_t> Client::ReluBackward(uint32_t handle, std::span<const int64_t> grad) {
  auto it = relu_bits_.find(handle);
  if (it == relu_bits_.end()) throw ParameterError("unknown ReLU handle " + std::to_string(handle));
  if (it->second.size() != grad.size()) throw ParameterError("gradient does not match the ReLU input");
  const auto mine = ShareOut(grad, uint8_t(Op::kReluBackward), handle, {});
  const auto y = mpc::Mux(party_, it->second, mine);
  relu_bits_.erase(it);
  return Open(y);
}

std::vector<int64_t> Client::MaxPool(std::span<const int64_t> x, int window, uint32_t* handle) {
  if (window < 1 || x.size() % size_t(window) != 0) throw ParameterError("input is not a whole number of windows");
  const uint32_t h = handle ? next_handle_++ : wire::kNoHandle;
  const auto mine = ShareOut(x, uint8_t(Op::kMaxPool), h, {uint32_t(window)});
  mpc::MaxPoolTrace trace;
  const auto y = mpc::MaxPool(party_, mine, window, handle ? &trace : nullptr);
  if (handle) {
    pool_traces_[h] = std::move(trace);
    *handle = h;
  }
  return Open(y);
}

std::vector<int64_t> Client::MaxPoolBackward(uint32_t handle, std::span<const int64_t> grad) {
  auto it = pool_traces_.find(handle);
  if (it == pool_traces_.end()) throw ParameterError("unknown max-pool handle " + std::to_string(handle));
  if (it->second.count != grad.size()) throw ParameterError("gradient does not match the pooled output");
  const auto mine = ShareOut(grad, uint8_t(Op::kMaxPoolBackward), handle, {});
  const auto y = mpc::MaxPoolBackward(party_, it->second, mine);
  pool_traces_.erase(it);
  return Open(y);
}

}  // namespace sectrain::linprot
