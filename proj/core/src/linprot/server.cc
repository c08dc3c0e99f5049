#include "sectrain/linprot/server.h"

#include <string>

#include "sectrain/common/errors.h"
#include "sectrain/he/keys.h"
#include "sectrain/mpc/share.h"
#include "wire.h"

namespace sectrain::linprot {

using wire::Op;

ServerSession::ServerSession(transport::Endpoint& channel, std::shared_ptr<const he::Scheme> scheme,
                             ServerConfig config, he::OpMeter* meter)
    : channel_(channel),
      scheme_(std::move(scheme)),
      config_(config),
      meter_(meter),
      party_(0, channel, config.dealer_seed, config.seed, config.share_bits) {}

void ServerSession::SetPhase(Phase p) {
  if (meter_) meter_->set_phase(p);
}

he::Evaluator& ServerSession::eval() {
  if (!eval_) throw ProtocolError("request before key setup");
  return *eval_;
}

void ServerSession::Serve() {
  for (;;) {
    Phase phase;
    Bytes request;
    try {
      request = channel_.RecvAny(phase);
    } catch (const ChannelClosed&) {
      return;
    }
    ByteReader in(request);
    const uint8_t op = in.GetU8();
    if (op == uint8_t(Op::kFinish)) return;
    try {
      Handle(op, in);
    } catch (const PrecomputeMissing& e) {
      channel_.SendError(std::string("PrecomputeMissing: ") + e.what());
    } catch (const SingleUseViolation& e) {
      channel_.SendError(std::string("SingleUseViolation: ") + e.what());
    } catch (const Error& e) {
      channel_.SendError(e.what());
      throw;
    }
  }
}

void ServerSession::Handle(uint8_t op, ByteReader& in) {
  switch (Op(op)) {
    case Op::kKeys:
      OnKeys(in);
      break;
    case Op::kLinearB:
      OnLinearB(in);
      break;
    case Op::kOffline:
      OnOffline(in);
      break;
    case Op::kOnline:
      OnOnline(in);
      break;
    case Op::kSync: {
      in.ExpectDone("sync");
      const uint8_t ack = uint8_t(Op::kSync);
      channel_.Send(Phase::kOffline, std::span(&ack, 1));
      break;
    }
    case Op::kRelu:
    case Op::kReluBackward:
    case Op::kMaxPool:
    case Op::kMaxPoolBackward:
      OnNonlinear(op, in);
      break;
    default:
      throw ProtocolError("unknown request " + std::to_string(op));
  }
}

void ServerSession::OnKeys(ByteReader& in) {
  he::KeySet keys = he::DeserializePublic(in, scheme_->cipher_ring());
  in.ExpectDone("key setup");
  if (keys.backend != scheme_->backend()) throw ProtocolError("client keys are for another backend");
  eval_.emplace(scheme_, std::move(keys), meter_, config_.seed);
}

void ServerSession::OnLinearB(ByteReader& in) {
  auto& ev = eval();
  SetPhase(Phase::kOnline);
  const JobShape shape = DeserializeJobShape(in);
  std::vector<he::Ciphertext> left, right;
  for (uint32_t i = 0; i < shape.left; ++i) left.push_back(wire::GetCipher(in, *scheme_));
  for (uint32_t j = 0; j < shape.right; ++j) right.push_back(wire::GetCipher(in, *scheme_));
  in.ExpectDone("linear request");

  ByteWriter out;
  for (const auto& terms : shape.outputs) {
    std::optional<he::Ciphertext> acc;
    for (const auto& [i, j] : terms) {
      he::Ciphertext prod = ev.CcMul(left[i], right[j]);
      acc = acc ? ev.CcAdd(*acc, prod) : std::move(prod);
    }
    wire::PutCipher(out, *acc);
  }
  channel_.Send(Phase::kOnline, out.bytes());
}

void ServerSession::OnOffline(ByteReader& in) {
  auto& ev = eval();
  SetPhase(Phase::kOffline);
  const uint32_t layer = in.GetU32();
  const uint32_t first = in.GetU32();
  const uint32_t count = in.GetU32();
  const JobShape shape = DeserializeJobShape(in);
  const auto terms = shape.Terms();
  for (uint32_t k = 0; k < count; ++k) {
    MaskPair pair{layer, first + k, shape, {}, {}, {}, false};
    for (uint32_t i = 0; i < shape.left; ++i) pair.enc_left.push_back(wire::GetCipher(in, *scheme_));
    for (uint32_t j = 0; j < shape.right; ++j) pair.enc_right.push_back(wire::GetCipher(in, *scheme_));
    for (const auto& [i, j] : terms) pair.products.push_back(ev.CcMul(pair.enc_left[i], pair.enc_right[j]));
    pool_.Add(std::move(pair));
  }
  in.ExpectDone("offline request");
  SetPhase(Phase::kOnline);
}

void ServerSession::OnOnline(ByteReader& in) {
  auto& ev = eval();
  SetPhase(Phase::kOnline);
  const uint32_t layer = in.GetU32();
  const uint32_t seq = in.GetU32();
  const JobShape shape = DeserializeJobShape(in);
  const auto& plain = scheme_->params().plain;
  std::vector<he::Ciphertext> x, w;
  for (uint32_t i = 0; i < shape.left; ++i) x.push_back(wire::GetCipher(in, *scheme_));
  for (uint32_t j = 0; j < shape.right; ++j) w.push_back(wire::GetCipher(in, *scheme_));
  std::vector<ring::RingElem> x_masked, w_masked;
  for (uint32_t i = 0; i < shape.left; ++i) x_masked.push_back(wire::GetPlain(in, plain));
  for (uint32_t j = 0; j < shape.right; ++j) w_masked.push_back(wire::GetPlain(in, plain));
  in.ExpectDone("online request");

  MaskPair pair = pool_.Consume(layer, seq);
  if (!(pair.shape == shape)) throw ProtocolError("online request does not match the precomputed shape");

  ByteWriter out;
  std::vector<ring::RingElem> p;
  size_t term = 0;
  for (const auto& terms : shape.outputs) {
    std::optional<he::Ciphertext> acc;
    std::optional<ring::RingElem> pacc;
    for (const auto& [i, j] : terms) {
      const he::Ciphertext c1 = ev.CpMul(x[i], w_masked[j]);
      const he::Ciphertext c2 = ev.CpMul(w[j], x_masked[i]);
      he::Ciphertext c = ev.CcAdd(ev.CcAdd(c1, c2), pair.products[term++]);
      acc = acc ? ev.CcAdd(*acc, c) : std::move(c);
      ring::RingElem pp = ev.PpMul(x_masked[i], w_masked[j]);
      pacc = pacc ? *pacc + pp : std::move(pp);
    }
    wire::PutCipher(out, *acc);
    p.push_back(std::move(*pacc));
  }
  for (const auto& e : p) wire::PutPlain(out, e);
  channel_.Send(Phase::kOnline, out.bytes());
}

void ServerSession::OnNonlinear(uint8_t op, ByteReader& in) {
  const uint32_t handle = in.GetU32();
  const bool keep = handle != wire::kNoHandle;
  uint32_t window = 0;
  if (Op(op) == Op::kMaxPool) window = in.GetU32();
  const auto x = wire::GetShares(in, config_.share_bits);
  in.ExpectDone("nonlinear request");

  std::vector<uint64_t> y;
  switch (Op(op)) {
    case Op::kRelu: {
      std::vector<uint8_t> bits;
      y = mpc::Relu(party_, x, keep ? &bits : nullptr);
      if (keep) relu_bits_[handle] = std::move(bits);
      break;
    }
    case Op::kReluBackward: {
      auto it = relu_bits_.find(handle);
      if (it == relu_bits_.end() || it->second.size() != x.size()) {
        throw ProtocolError("unknown ReLU handle " + std::to_string(handle));
      }
      y = mpc::Mux(party_, it->second, x);
      relu_bits_.erase(it);
      break;
    }
    case Op::kMaxPool: {
      if (window < 1 || x.size() % window != 0) throw ProtocolError("bad max-pool window");
      mpc::MaxPoolTrace trace;
      y = mpc::MaxPool(party_, x, int(window), keep ? &trace : nullptr);
      if (keep) pool_traces_[handle] = std::move(trace);
      break;
    }
    default: {
      auto it = pool_traces_.find(handle);
      if (it == pool_traces_.end() || it->second.count != x.size()) {
        throw ProtocolError("unknown max-pool handle " + std::to_string(handle));
      }
      y = mpc::MaxPoolBackward(party_, it->second, x);
      pool_traces_.erase(it);
      break;
    }
  }
  ByteWriter out;
  wire::PutShares(out, y, config_.share_bits);
  channel_.Send(Phase::kNonlinear, out.bytes());
}

}  // namespace sectrain::linprot
