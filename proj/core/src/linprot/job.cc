#include "sectrain/linprot/job.h"

#include <string>

#include "sectrain/common/errors.h"

namespace sectrain::linprot {

void JobShape::Validate() const {
  if (outputs.empty()) throw ParameterError("linear job has no outputs");
  for (const auto& out : outputs) {
    if (out.empty()) throw ParameterError("linear job output has no terms");
    for (const auto& [i, j] : out) {
      if (i >= left || j >= right) {
        throw ParameterError("term (" + std::to_string(i) + ", " + std::to_string(j) +
                             ") outside the operand lists");
      }
    }
  }
}

size_t JobShape::num_products() const {
  size_t n = 0;
  for (const auto& out : outputs) n += out.size();
  return n;
}

std::vector<JobShape::Term> JobShape::Terms() const {
  std::vector<Term> all;
  all.reserve(num_products());
  for (const auto& out : outputs) all.insert(all.end(), out.begin(), out.end());
  return all;
}

void Serialize(const JobShape& shape, ByteWriter& out) {
  out.PutU32(shape.left);
  out.PutU32(shape.right);
  out.PutU32(static_cast<uint32_t>(shape.outputs.size()));
  for (const auto& o : shape.outputs) {
    out.PutU32(static_cast<uint32_t>(o.size()));
    for (const auto& [i, j] : o) {
      out.PutU32(i);
      out.PutU32(j);
    }
  }
}

JobShape DeserializeJobShape(ByteReader& in) {
  JobShape s;
  s.left = in.GetU32();
  s.right = in.GetU32();
  const uint32_t n = in.GetU32();
  if (n > in.remaining() / 4) throw SerializationError("job shape output count too large");
  s.outputs.resize(n);
  for (auto& o : s.outputs) {
    const uint32_t m = in.GetU32();
    if (m > in.remaining() / 8) throw SerializationError("job shape term count too large");
    o.resize(m);
    for (auto& [i, j] : o) {
      i = in.GetU32();
      j = in.GetU32();
    }
  }
  s.Validate();
  return s;
}

void LinearJob::Validate() const {
  shape.Validate();
  if (left.size() != shape.left || right.size() != shape.right) {
    throw ParameterError("operand counts do not match the job shape");
  }
}

namespace {

void CheckSize(std::span<const int64_t> v, size_t n, const char* what) {
  if (v.size() != n) {
    throw ParameterError(std::string(what) + " has " + std::to_string(v.size()) +
                         " entries, expected " + std::to_string(n));
  }
}

}  // namespace

ConvOp::ConvOp(int c_in, int c_out, const packing::ConvShape& shape, packing::Layout layout,
               uint32_t capacity)
    : c_in_(c_in), c_out_(c_out) {
  if (c_in < 1 || c_out < 1) throw ParameterError("channel counts must be positive");
  plan_ = layout == packing::Layout::kCorrelated ? packing::PlanCorrelated(shape, capacity)
                                                 : packing::PlanBaseline(shape, capacity);
  const auto t = static_cast<uint32_t>(plan_.num_tiles());
  job_.left = uint32_t(c_in) * t;
  job_.right = uint32_t(c_out) * uint32_t(c_in);
  for (uint32_t o = 0; o < uint32_t(c_out); ++o) {
    for (uint32_t tile = 0; tile < t; ++tile) {
      std::vector<JobShape::Term> terms;
      for (uint32_t c = 0; c < uint32_t(c_in); ++c) terms.emplace_back(c * t + tile, o * c_in + c);
      job_.outputs.push_back(std::move(terms));
    }
  }
}

LinearJob ConvOp::Pack(std::span<const int64_t> x, std::span<const int64_t> w,
                       const ring::RingParams& plain) const {
  const auto& s = plan_.shape;
  const size_t in_sz = size_t(s.H) * s.W, k_sz = size_t(s.h) * s.h;
  CheckSize(x, in_sz * c_in_, "conv input");
  CheckSize(w, k_sz * c_in_ * c_out_, "conv kernel");
  LinearJob job{job_, {}, {}};
  for (int c = 0; c < c_in_; ++c) {
    auto polys = packing::PackInput(plan_, x.subspan(c * in_sz, in_sz), plain);
    for (auto& p : polys) job.left.push_back(std::move(p));
  }
  for (int o = 0; o < c_out_; ++o) {
    for (int c = 0; c < c_in_; ++c) {
      job.right.push_back(packing::PackKernel(plan_, w.subspan((size_t(o) * c_in_ + c) * k_sz, k_sz), plain));
    }
  }
  return job;
}

std::vector<int64_t> ConvOp::Extract(std::span<const ring::RingElem> outputs) const {
  const size_t t = plan_.num_tiles();
  if (outputs.size() != t * c_out_) throw ParameterError("conv output count mismatch");
  std::vector<int64_t> y;
  for (int o = 0; o < c_out_; ++o) {
    auto part = packing::ExtractOutput(plan_, outputs.subspan(o * t, t));
    y.insert(y.end(), part.begin(), part.end());
  }
  return y;
}

MatVecOp::MatVecOp(int n_in, int n_out, uint32_t capacity)
    : plan_(packing::PlanMatVec(n_in, n_out, capacity)) {
  const auto ib = uint32_t(plan_.in_blocks()), ob = uint32_t(plan_.out_blocks());
  job_.left = ib;
  job_.right = ib * ob;
  for (uint32_t o = 0; o < ob; ++o) {
    std::vector<JobShape::Term> terms;
    for (uint32_t i = 0; i < ib; ++i) terms.emplace_back(i, o * ib + i);
    job_.outputs.push_back(std::move(terms));
  }
}

LinearJob MatVecOp::Pack(std::span<const int64_t> x, std::span<const int64_t> w,
                         const ring::RingParams& plain) const {
  return {job_, packing::PackVector(plan_, x, plain), packing::PackMatrix(plan_, w, plain)};
}

std::vector<int64_t> MatVecOp::Extract(std::span<const ring::RingElem> outputs) const {
  if (outputs.size() != size_t(plan_.out_blocks())) throw ParameterError("matvec output count mismatch");
  std::vector<int64_t> y(plan_.n_out);
  for (int o = 0; o < plan_.n_out; ++o) {
    const auto coeffs = outputs[o / plan_.block_out].ToSigned();
    y[o] = coeffs[size_t(o % plan_.block_out) * plan_.block_in + plan_.block_in - 1];
  }
  return y;
}

OuterOp::OuterOp(int n_in, int n_out, uint32_t capacity)
    : plan_(packing::PlanMatVec(n_in, n_out, capacity)) {
  const auto ib = uint32_t(plan_.in_blocks()), ob = uint32_t(plan_.out_blocks());
  job_.left = ob;
  job_.right = ib;
  for (uint32_t o = 0; o < ob; ++o) {
    for (uint32_t i = 0; i < ib; ++i) job_.outputs.push_back({{o, i}});
  }
}

LinearJob OuterOp::Pack(std::span<const int64_t> g, std::span<const int64_t> x,
                        const ring::RingParams& plain) const {
  return {job_, packing::PackOuterLeft(plan_, g, plain), packing::PackVector(plan_, x, plain)};
}

std::vector<int64_t> OuterOp::Extract(std::span<const ring::RingElem> outputs) const {
  return packing::ExtractOuter(plan_, outputs);
}

ScaleOp::ScaleOp(int channels, int size, uint32_t capacity) : channels_(channels), size_(size) {
  if (channels < 1 || size < 1 || capacity < 1) throw ParameterError("scale op needs positive sizes");
  chunk_ = std::min<int>(size, int(capacity));
  chunks_ = (size + chunk_ - 1) / chunk_;
  job_.left = uint32_t(channels) * uint32_t(chunks_);
  job_.right = uint32_t(channels);
  for (uint32_t c = 0; c < uint32_t(channels); ++c) {
    for (uint32_t k = 0; k < uint32_t(chunks_); ++k) job_.outputs.push_back({{c * chunks_ + k, c}});
  }
}

LinearJob ScaleOp::Pack(std::span<const int64_t> x, std::span<const int64_t> gamma,
                        const ring::RingParams& plain) const {
  CheckSize(x, size_t(channels_) * size_, "scale input");
  CheckSize(gamma, size_t(channels_), "scale factors");
  if (plain.degree() < uint32_t(chunk_)) throw ParameterError("ring too small for the scale chunk");
  LinearJob job{job_, {}, {}};
  for (int c = 0; c < channels_; ++c) {
    for (int k = 0; k < chunks_; ++k) {
      ring::RingElemBuilder b(plain);
      const int begin = k * chunk_, end = std::min(size_, begin + chunk_);
      for (int i = begin; i < end; ++i) b.SetSigned(size_t(i - begin), x[size_t(c) * size_ + i]);
      job.left.push_back(std::move(b).Build());
    }
    job.right.push_back(ring::RingElem::Constant(plain, gamma[c]));
  }
  return job;
}

std::vector<int64_t> ScaleOp::Extract(std::span<const ring::RingElem> outputs) const {
  if (outputs.size() != size_t(channels_) * chunks_) throw ParameterError("scale output count mismatch");
  std::vector<int64_t> y(size_t(channels_) * size_);
  for (int c = 0; c < channels_; ++c) {
    for (int k = 0; k < chunks_; ++k) {
      const auto coeffs = outputs[size_t(c) * chunks_ + k].ToSigned();
      const int begin = k * chunk_, end = std::min(size_, begin + chunk_);
      for (int i = begin; i < end; ++i) y[size_t(c) * size_ + i] = coeffs[size_t(i - begin)];
    }
  }
  return y;
}

}  // namespace sectrain::linprot
