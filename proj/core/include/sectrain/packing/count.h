#ifndef SECTRAIN_PACKING_COUNT_H_
#define SECTRAIN_PACKING_COUNT_H_

#include <cstdint>
#include <string>

#include "sectrain/packing/plan.h"

namespace sectrain::packing {

// Largest degree of the padded row-major input under full padding, H = W.
int64_t AnalyticN1(int H, int h);
// Largest degree of the correlated input, H = W.
int64_t AnalyticN2(int H, int h);
// floor((h+1)/2)*H + floor((h-1)/2)*h.
int64_t AnalyticDifference(int H, int h);

struct CountReport {
  Layout layout = Layout::kCorrelated;
  uint64_t mults = 0;
  uint64_t input_polys = 0;
  uint64_t kernel_polys = 0;
  int64_t n1 = 0;
  int64_t n2 = 0;
  uint32_t max_degree = 0;  // largest input degree over tiles
  uint32_t kernel_max_degree = 0;
  uint64_t untiled_degree = 0;  // input degree if packed as one polynomial
  bool tiled = false;
  Window window;
  double window_objective = 0;
  uint64_t used_outputs = 0;
  uint64_t product_terms = 0;  // product coefficients that can be nonzero
  bool trivial = false;        // h == 1

  std::string ToJson() const;
};

// Counts for one layer with c_in input and c_out output channels; every
// channel pair is an independent single-channel convolution.
CountReport Count(const ConvShape& shape, uint32_t capacity, Layout layout, int c_in = 1,
                  int c_out = 1);

}  // namespace sectrain::packing

#endif  // SECTRAIN_PACKING_COUNT_H_
