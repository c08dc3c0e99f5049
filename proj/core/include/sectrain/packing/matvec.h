#ifndef SECTRAIN_PACKING_MATVEC_H_
#define SECTRAIN_PACKING_MATVEC_H_

#include <cstdint>
#include <span>
#include <vector>

#include "sectrain/ring/ring.h"

namespace sectrain::packing {

// Blocked layout for y = W x (W is n_out x n_in) and for outer products.
// Within a block, x[j] sits at degree j and W[o, j] at degree
// o*block_in + block_in - 1 - j, so y[o] is read at o*block_in + block_in - 1.
// Blocks satisfy block_in * block_out <= capacity, which keeps every read
// degree clear of negacyclic wrap.
struct MatVecPlan {
  int n_in = 0;
  int n_out = 0;
  int block_in = 0;
  int block_out = 0;

  int in_blocks() const { return (n_in + block_in - 1) / block_in; }
  int out_blocks() const { return (n_out + block_out - 1) / block_out; }
  // Products are indexed out_block * in_blocks() + in_block.
  int num_mults() const { return in_blocks() * out_blocks(); }
};

MatVecPlan PlanMatVec(int n_in, int n_out, uint32_t capacity);

// One polynomial per input block.
std::vector<ring::RingElem> PackVector(const MatVecPlan& plan, std::span<const int64_t> x,
                                       const ring::RingParams& params);
// One polynomial per (out block, in block); w is n_out x n_in row-major.
std::vector<ring::RingElem> PackMatrix(const MatVecPlan& plan, std::span<const int64_t> w,
                                       const ring::RingParams& params);
// Sums the in-block partial products of each out block. Length n_out.
std::vector<int64_t> ExtractMatVec(const MatVecPlan& plan,
                                   std::span<const ring::RingElem> products);

// Outer product g x^T (n_out x n_in): g[o] at degree o*block_in, one
// polynomial per out block; pair with PackVector(x).
std::vector<ring::RingElem> PackOuterLeft(const MatVecPlan& plan, std::span<const int64_t> g,
                                          const ring::RingParams& params);
std::vector<int64_t> ExtractOuter(const MatVecPlan& plan,
                                  std::span<const ring::RingElem> products);

}  // namespace sectrain::packing

#endif  // SECTRAIN_PACKING_MATVEC_H_
