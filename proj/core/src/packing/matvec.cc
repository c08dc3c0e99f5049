#include "sectrain/packing/matvec.h"

#include <algorithm>
#include <string>

#include "sectrain/common/errors.h"

namespace sectrain::packing {

MatVecPlan PlanMatVec(int n_in, int n_out, uint32_t capacity) {
  if (n_in < 1 || n_out < 1) throw ParameterError("matvec dimensions must be positive");
  if (capacity < 2) throw InfeasibleError("capacity too small for matvec packing");
  MatVecPlan p;
  p.n_in = n_in;
  p.n_out = n_out;
  p.block_in = static_cast<int>(std::min<uint64_t>(n_in, capacity / 2));
  p.block_out = static_cast<int>(std::min<uint64_t>(n_out, capacity / p.block_in));
  return p;
}

namespace {

void CheckRing(const MatVecPlan& plan, const ring::RingParams& params) {
  if (uint64_t(plan.block_in) * plan.block_out > params.degree()) {
    throw PartitionError("matvec block does not fit ring degree " +
                         std::to_string(params.degree()));
  }
}

}  // namespace

std::vector<ring::RingElem> PackVector(const MatVecPlan& plan, std::span<const int64_t> x,
                                       const ring::RingParams& params) {
  if (x.size() != size_t(plan.n_in)) throw ParameterError("vector length mismatch");
  CheckRing(plan, params);
  std::vector<ring::RingElem> out;
  for (int ib = 0; ib < plan.in_blocks(); ++ib) {
    ring::RingElemBuilder b(params);
    for (int j = 0; j < plan.block_in; ++j) {
      const int col = ib * plan.block_in + j;
      if (col < plan.n_in) b.SetSigned(j, x[col]);
    }
    out.push_back(std::move(b).Build());
  }
  return out;
}

std::vector<ring::RingElem> PackMatrix(const MatVecPlan& plan, std::span<const int64_t> w,
                                       const ring::RingParams& params) {
  if (w.size() != size_t(plan.n_in) * plan.n_out) throw ParameterError("matrix size mismatch");
  CheckRing(plan, params);
  std::vector<ring::RingElem> out;
  for (int ob = 0; ob < plan.out_blocks(); ++ob) {
    for (int ib = 0; ib < plan.in_blocks(); ++ib) {
      ring::RingElemBuilder b(params);
      for (int o = 0; o < plan.block_out; ++o) {
        const int row = ob * plan.block_out + o;
        if (row >= plan.n_out) break;
        for (int j = 0; j < plan.block_in; ++j) {
          const int col = ib * plan.block_in + j;
          if (col >= plan.n_in) break;
          b.SetSigned(o * plan.block_in + plan.block_in - 1 - j, w[size_t(row) * plan.n_in + col]);
        }
      }
      out.push_back(std::move(b).Build());
    }
  }
  return out;
}

std::vector<int64_t> ExtractMatVec(const MatVecPlan& plan,
                                   std::span<const ring::RingElem> products) {
  if (products.size() != size_t(plan.num_mults())) {
    throw ContractError("expected one product per matvec block pair");
  }
  std::vector<int64_t> y(plan.n_out, 0);
  for (int ob = 0; ob < plan.out_blocks(); ++ob) {
    for (int ib = 0; ib < plan.in_blocks(); ++ib) {
      const auto c = products[size_t(ob) * plan.in_blocks() + ib].ToSigned();
      for (int o = 0; o < plan.block_out; ++o) {
        const int row = ob * plan.block_out + o;
        if (row >= plan.n_out) break;
        y[row] += c[size_t(o) * plan.block_in + plan.block_in - 1];
      }
    }
  }
  return y;
}

std::vector<ring::RingElem> PackOuterLeft(const MatVecPlan& plan, std::span<const int64_t> g,
                                          const ring::RingParams& params) {
  if (g.size() != size_t(plan.n_out)) throw ParameterError("vector length mismatch");
  CheckRing(plan, params);
  std::vector<ring::RingElem> out;
  for (int ob = 0; ob < plan.out_blocks(); ++ob) {
    ring::RingElemBuilder b(params);
    for (int o = 0; o < plan.block_out; ++o) {
      const int row = ob * plan.block_out + o;
      if (row < plan.n_out) b.SetSigned(size_t(o) * plan.block_in, g[row]);
    }
    out.push_back(std::move(b).Build());
  }
  return out;
}

std::vector<int64_t> ExtractOuter(const MatVecPlan& plan,
                                  std::span<const ring::RingElem> products) {
  if (products.size() != size_t(plan.num_mults())) {
    throw ContractError("expected one product per outer-product block pair");
  }
  std::vector<int64_t> m(size_t(plan.n_out) * plan.n_in, 0);
  for (int ob = 0; ob < plan.out_blocks(); ++ob) {
    for (int ib = 0; ib < plan.in_blocks(); ++ib) {
      const auto c = products[size_t(ob) * plan.in_blocks() + ib].ToSigned();
      for (int o = 0; o < plan.block_out; ++o) {
        const int row = ob * plan.block_out + o;
        if (row >= plan.n_out) break;
        for (int j = 0; j < plan.block_in; ++j) {
          const int col = ib * plan.block_in + j;
          if (col >= plan.n_in) break;
          m[size_t(row) * plan.n_in + col] = c[size_t(o) * plan.block_in + j];
        }
      }
    }
  }
  return m;
}

}  // namespace sectrain::packing
