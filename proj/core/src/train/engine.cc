#include "sectrain/train/engine.h"

#include <chrono>
#include <string>

#include "sectrain/common/errors.h"

namespace sectrain::train {

namespace {

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void CheckShares(std::span<const int64_t> x, int bits) {
  const int64_t bound = int64_t(1) << (bits - 1);
  for (int64_t v : x) {
    if (v < -bound || v >= bound) {
      throw OverflowError("value " + std::to_string(v) + " does not fit " + std::to_string(bits) +
                          " signed bits");
    }
  }
}

void Expect(size_t got, size_t want, const char* what) {
  if (got != want) {
    throw ParameterError(std::string(what) + " has " + std::to_string(got) + " entries, expected " +
                         std::to_string(want));
  }
}

size_t OperandSize(const LinearSpec& s, bool left) {
  using K = LinearSpec::Kind;
  switch (s.kind) {
    case K::kConv:
      return left ? size_t(s.c_in) * s.conv.H * s.conv.W
                  : size_t(s.c_out) * s.c_in * s.conv.h * s.conv.h;
    case K::kMatVec:
      return left ? size_t(s.c_in) : size_t(s.c_in) * s.c_out;
    case K::kOuter:
      return left ? size_t(s.c_out) : size_t(s.c_in);
    case K::kScale:
      return left ? size_t(s.c_in) * s.c_out : size_t(s.c_in);
  }
  return 0;
}

}  // namespace

void Engine::Charge(double seconds, uint64_t bytes) {
  online_seconds_ += seconds;
  LayerCost& c = layer_costs_[layer_];
  if (backward_) {
    c.backward_seconds += seconds;
    c.backward_bytes += bytes;
  } else {
    c.forward_seconds += seconds;
    c.forward_bytes += bytes;
  }
}

size_t LinearSpec::result_size() const {
  switch (kind) {
    case Kind::kConv: return size_t(c_out) * conv.out_h() * conv.out_w();
    case Kind::kMatVec: return size_t(c_out);
    case Kind::kOuter: return size_t(c_out) * c_in;
    case Kind::kScale: return size_t(c_in) * c_out;
  }
  return 0;
}

PlainEngine::PlainEngine(uint64_t modulus, int share_bits)
    : half_(modulus / 2), share_bits_(share_bits) {}

void PlainEngine::Declare(uint32_t id, const LinearSpec& spec) {
  if (spec.kind == LinearSpec::Kind::kConv) spec.conv.Validate();
  specs_[id] = spec;
}

std::vector<int64_t> PlainEngine::Linear(uint32_t id, std::span<const int64_t> a,
                                         std::span<const int64_t> b) {
  const auto t0 = Clock::now();
  const auto it = specs_.find(id);
  if (it == specs_.end()) throw ParameterError("undeclared linear operation " + std::to_string(id));
  const LinearSpec& s = it->second;
  Expect(a.size(), OperandSize(s, true), "left operand");
  Expect(b.size(), OperandSize(s, false), "right operand");

  std::vector<int64_t> y(s.result_size());
  std::vector<unsigned __int128> mag(y.size());
  auto acc = [&](size_t k, int64_t u, int64_t v) {
    const __int128 p = __int128(u) * v;
    y[k] += int64_t(p);
    mag[k] += p < 0 ? -p : p;
  };
  using K = LinearSpec::Kind;
  switch (s.kind) {
    case K::kConv: {
      const auto& c = s.conv;
      const int oh = c.out_h(), ow = c.out_w();
      for (int o = 0; o < s.c_out; ++o) {
        for (int ci = 0; ci < s.c_in; ++ci) {
          const int64_t* x = a.data() + size_t(ci) * c.H * c.W;
          const int64_t* w = b.data() + (size_t(o) * s.c_in + ci) * c.h * c.h;
          for (int u = 0; u < oh; ++u) {
            for (int v = 0; v < ow; ++v) {
              const size_t k = (size_t(o) * oh + u) * ow + v;
              for (int p = 0; p < c.h; ++p) {
                const int i = u - c.pad + p;
                if (i < 0 || i >= c.H) continue;
                for (int q = 0; q < c.h; ++q) {
                  const int j = v - c.pad + q;
                  if (j >= 0 && j < c.W) acc(k, x[i * c.W + j], w[p * c.h + q]);
                }
              }
            }
          }
        }
      }
      break;
    }
    case K::kMatVec:
      for (int o = 0; o < s.c_out; ++o) {
        for (int j = 0; j < s.c_in; ++j) acc(o, b[size_t(o) * s.c_in + j], a[j]);
      }
      break;
    case K::kOuter:
      for (int o = 0; o < s.c_out; ++o) {
        for (int j = 0; j < s.c_in; ++j) acc(size_t(o) * s.c_in + j, a[o], b[j]);
      }
      break;
    case K::kScale:
      for (int ch = 0; ch < s.c_in; ++ch) {
        for (int i = 0; i < s.c_out; ++i) acc(size_t(ch) * s.c_out + i, a[size_t(ch) * s.c_out + i], b[ch]);
      }
      break;
  }
  for (size_t k = 0; k < y.size(); ++k) {
    if (mag[k] >= half_) {
      throw OverflowError("linear operation " + std::to_string(id) +
                          " exceeds the plaintext modulus at output " + std::to_string(k));
    }
  }
  Charge(Since(t0), 0);
  return y;
}

std::vector<int64_t> PlainEngine::Relu(std::span<const int64_t> x, uint32_t* handle) {
  CheckShares(x, share_bits_);
  std::vector<int64_t> y(x.size());
  std::vector<uint8_t> bits(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    bits[i] = x[i] >= 0;
    y[i] = bits[i] ? x[i] : 0;
  }
  if (handle) {
    *handle = next_handle_++;
    relu_bits_[*handle] = std::move(bits);
  }
  return y;
}

std::vector<int64_t> PlainEngine::ReluBackward(uint32_t handle, std::span<const int64_t> g) {
  auto node = relu_bits_.extract(handle);
  if (node.empty()) throw ParameterError("unknown relu handle");
  const auto& bits = node.mapped();
  Expect(g.size(), bits.size(), "relu gradient");
  CheckShares(g, share_bits_);
  std::vector<int64_t> dx(g.size());
  for (size_t i = 0; i < g.size(); ++i) dx[i] = bits[i] ? g[i] : 0;
  return dx;
}

std::vector<int64_t> PlainEngine::MaxPool(std::span<const int64_t> x, int window, uint32_t* handle) {
  if (window < 1 || x.size() % size_t(window)) throw ParameterError("input is not a whole number of windows");
  CheckShares(x, share_bits_);
  const size_t n = x.size() / window;
  std::vector<int64_t> y(n);
  std::vector<uint32_t> arg(n);
  for (size_t e = 0; e < n; ++e) {
    size_t best = e * window;
    for (size_t j = best + 1; j < (e + 1) * window; ++j) {
      if (x[j] > x[best]) best = j;
    }
    y[e] = x[best];
    arg[e] = uint32_t(best);
  }
  if (handle) {
    *handle = next_handle_++;
    argmax_[*handle] = {window, std::move(arg)};
  }
  return y;
}

std::vector<int64_t> PlainEngine::MaxPoolBackward(uint32_t handle, std::span<const int64_t> g) {
  auto node = argmax_.extract(handle);
  if (node.empty()) throw ParameterError("unknown maxpool handle");
  const auto& [window, arg] = node.mapped();
  Expect(g.size(), arg.size(), "maxpool gradient");
  CheckShares(g, share_bits_);
  std::vector<int64_t> dx(arg.size() * window);
  for (size_t e = 0; e < arg.size(); ++e) dx[arg[e]] = g[e];
  return dx;
}

SecureEngine::SecureEngine(linprot::Client& client, linprot::Protocol protocol, packing::Layout layout)
    : client_(client),
      protocol_(protocol),
      layout_(layout),
      capacity_(client.evaluator().params().plain.degree()) {}

void SecureEngine::Declare(uint32_t id, const LinearSpec& s) {
  using K = LinearSpec::Kind;
  switch (s.kind) {
    case K::kConv:
      ops_.insert_or_assign(id, linprot::ConvOp(s.c_in, s.c_out, s.conv, layout_, capacity_));
      break;
    case K::kMatVec:
      ops_.insert_or_assign(id, linprot::MatVecOp(s.c_in, s.c_out, capacity_));
      break;
    case K::kOuter:
      ops_.insert_or_assign(id, linprot::OuterOp(s.c_in, s.c_out, capacity_));
      break;
    case K::kScale:
      ops_.insert_or_assign(id, linprot::ScaleOp(s.c_in, s.c_out, capacity_));
      break;
  }
}

void SecureEngine::Prepare(uint32_t id, size_t count) {
  if (protocol_ != linprot::Protocol::kPrecompute || count == 0) return;
  const auto t0 = Clock::now();
  const auto it = ops_.find(id);
  if (it == ops_.end()) throw ParameterError("undeclared linear operation " + std::to_string(id));
  const linprot::JobShape& shape = std::visit([](const auto& op) -> const linprot::JobShape& { return op.shape(); },
                                              it->second);
  client_.Offline(id, shape, count);
  pending_ = true;
  offline_seconds_ += Since(t0);
}

void SecureEngine::FinishPrepare() {
  if (!pending_) return;
  const auto t0 = Clock::now();
  client_.SyncOffline();
  pending_ = false;
  offline_seconds_ += Since(t0);
}

template <typename F>
std::vector<int64_t> SecureEngine::Online(F&& f) {
  const auto t0 = Clock::now();
  const uint64_t b0 = client_.channel().report().total_bytes();
  auto y = f();
  Charge(Since(t0), client_.channel().report().total_bytes() - b0);
  return y;
}

std::vector<int64_t> SecureEngine::Linear(uint32_t id, std::span<const int64_t> a,
                                          std::span<const int64_t> b) {
  const auto it = ops_.find(id);
  if (it == ops_.end()) throw ParameterError("undeclared linear operation " + std::to_string(id));
  if (std::holds_alternative<linprot::ConvOp>(it->second)) ++conv_calls_[int(layout_)];
  return Online([&] {
    return std::visit(
        [&](const auto& op) {
          const linprot::LinearJob job = op.Pack(a, b, client_.evaluator().params().plain);
          return op.Extract(client_.Run(protocol_, id, job));
        },
        it->second);
  });
}

std::vector<int64_t> SecureEngine::Relu(std::span<const int64_t> x, uint32_t* handle) {
  return Online([&] { return client_.Relu(x, handle); });
}

std::vector<int64_t> SecureEngine::ReluBackward(uint32_t handle, std::span<const int64_t> g) {
  return Online([&] { return client_.ReluBackward(handle, g); });
}

std::vector<int64_t> SecureEngine::MaxPool(std::span<const int64_t> x, int window, uint32_t* handle) {
  return Online([&] { return client_.MaxPool(x, window, handle); });
}

std::vector<int64_t> SecureEngine::MaxPoolBackward(uint32_t handle, std::span<const int64_t> g) {
  return Online([&] { return client_.MaxPoolBackward(handle, g); });
}

}  // namespace sectrain::train
