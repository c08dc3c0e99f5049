#ifndef SECTRAIN_LINPROT_JOB_H_
#define SECTRAIN_LINPROT_JOB_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sectrain/common/bytes.h"
#include "sectrain/packing/matvec.h"
#include "sectrain/packing/plan.h"
#include "sectrain/ring/ring.h"

namespace sectrain::linprot {

// Which polynomial products a linear operation needs: output k is the sum
// of left[i] * right[j] over the pairs in outputs[k].
struct JobShape {
  using Term = std::pair<uint32_t, uint32_t>;

  uint32_t left = 0;
  uint32_t right = 0;
  std::vector<std::vector<Term>> outputs;

  // Throws ParameterError on out-of-range terms or empty outputs.
  void Validate() const;
  size_t num_products() const;
  // All terms in output order.
  std::vector<Term> Terms() const;

  friend bool operator==(const JobShape&, const JobShape&) = default;
};

void Serialize(const JobShape& shape, ByteWriter& out);
JobShape DeserializeJobShape(ByteReader& in);

// Plaintext operands of one linear operation, over the plaintext ring.
struct LinearJob {
  JobShape shape;
  std::vector<ring::RingElem> left;
  std::vector<ring::RingElem> right;

  void Validate() const;
};

// Multi-channel 2-D convolution: y[o] = sum_c x[c] (*) w[o, c], where (*)
// is the stride-1 cross-correlation of `packing`.
class ConvOp {
 public:
  ConvOp(int c_in, int c_out, const packing::ConvShape& shape, packing::Layout layout,
         uint32_t capacity);

  int c_in() const { return c_in_; }
  int c_out() const { return c_out_; }
  const packing::PackingPlan& plan() const { return plan_; }
  const JobShape& shape() const { return job_; }

  // x is c_in x H x W, w is c_out x c_in x h x h.
  LinearJob Pack(std::span<const int64_t> x, std::span<const int64_t> w,
                 const ring::RingParams& plain) const;
  // Returns c_out x out_h x out_w.
  std::vector<int64_t> Extract(std::span<const ring::RingElem> outputs) const;

 private:
  int c_in_;
  int c_out_;
  packing::PackingPlan plan_;
  JobShape job_;
};

// y = W x with W n_out x n_in.
class MatVecOp {
 public:
  MatVecOp(int n_in, int n_out, uint32_t capacity);

  const packing::MatVecPlan& plan() const { return plan_; }
  const JobShape& shape() const { return job_; }
  LinearJob Pack(std::span<const int64_t> x, std::span<const int64_t> w,
                 const ring::RingParams& plain) const;
  std::vector<int64_t> Extract(std::span<const ring::RingElem> outputs) const;

 private:
  packing::MatVecPlan plan_;
  JobShape job_;
};

// g x^T with g of length n_out and x of length n_in.
class OuterOp {
 public:
  OuterOp(int n_in, int n_out, uint32_t capacity);

  const JobShape& shape() const { return job_; }
  LinearJob Pack(std::span<const int64_t> g, std::span<const int64_t> x,
                 const ring::RingParams& plain) const;
  // n_out x n_in row-major.
  std::vector<int64_t> Extract(std::span<const ring::RingElem> outputs) const;

 private:
  packing::MatVecPlan plan_;
  JobShape job_;
};

// Per-channel scaling y[c, i] = gamma[c] * x[c, i]; the product with a
// constant polynomial keeps every coefficient in place.
class ScaleOp {
 public:
  ScaleOp(int channels, int size, uint32_t capacity);

  const JobShape& shape() const { return job_; }
  LinearJob Pack(std::span<const int64_t> x, std::span<const int64_t> gamma,
                 const ring::RingParams& plain) const;
  std::vector<int64_t> Extract(std::span<const ring::RingElem> outputs) const;

 private:
  int channels_;
  int size_;
  int chunk_;
  int chunks_;
  JobShape job_;
};

}  // namespace sectrain::linprot

#endif  // SECTRAIN_LINPROT_JOB_H_
