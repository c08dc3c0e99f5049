#ifndef SECTRAIN_PACKING_PLAN_H_
#define SECTRAIN_PACKING_PLAN_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "sectrain/packing/conv_shape.h"
#include "sectrain/ring/ring.h"

namespace sectrain::packing {

enum class Layout : uint8_t { kBaseline, kCorrelated };

std::string_view LayoutName(Layout l);
Layout ParseLayout(std::string_view name);

struct Slot {
  uint32_t tile = 0;
  uint32_t degree = 0;
};

struct Window {
  int h = 0;
  int w = 0;
};

struct Origin {
  int row = 0;
  int col = 0;
};

// Assignment of input, kernel and output entries to polynomial degrees.
//
// Every plan works in a coordinate frame where input entry (i, j) sits at
// (i + offset, j + offset). Tile t covers the win_h x win_w block at
// origin tiles[t]; a cell at local (r, c) goes to degree r * stride + c.
// The kernel entry (a, b) goes to degree (h-1-a) * stride + (h-1-b), and
// output (u, v) is read from the local full-convolution index
// (u + extract - row0, v + extract - col0).
struct PackingPlan {
  Layout layout = Layout::kCorrelated;
  ConvShape shape;
  uint32_t capacity = 0;
  bool tiled = false;
  int offset = 0;
  int extract = 0;
  int win_h = 0;
  int win_w = 0;
  int stride = 0;
  std::vector<Origin> tiles;
  // One slot per tile containing the entry; exactly one for untiled plans.
  std::vector<std::vector<Slot>> coeff_map;
  std::vector<Slot> out_map;
  std::vector<uint32_t> kernel_map;
  // Largest input degree per tile. Baseline plans count materialized
  // padding; correlated plans only real entries.
  std::vector<uint32_t> degree_bound;
  uint32_t kernel_degree = 0;

  size_t num_tiles() const { return tiles.size(); }
  uint32_t max_input_degree() const;
};

// Correlated layout. Uses a single polynomial with full-convolution
// extraction when that fits `capacity` coefficients without corrupting any
// output; otherwise tiles the padded input with ChooseTiles.
PackingPlan PlanCorrelated(const ConvShape& shape, uint32_t capacity);
// Correlated layout tiled with an explicit window over the padded input.
PackingPlan PlanCorrelatedTiled(const ConvShape& shape, uint32_t capacity, Window window);
// Row-major layout of the zero-padded input. One polynomial if the padded
// input fits, otherwise s x s windows with s = floor(sqrt(capacity)).
PackingPlan PlanBaseline(const ConvShape& shape, uint32_t capacity);

// x is H x W row-major. Throws PartitionError if a degree does not fit the
// ring.
std::vector<ring::RingElem> PackInput(const PackingPlan& plan, std::span<const int64_t> x,
                                      const ring::RingParams& params);
// w is h x h row-major.
ring::RingElem PackKernel(const PackingPlan& plan, std::span<const int64_t> w,
                          const ring::RingParams& params);
// One product per tile. Returns out_h x out_w row-major, centered.
// Throws PackingOverflow if negacyclic wrap reaches an output degree.
std::vector<int64_t> ExtractOutput(const PackingPlan& plan,
                                   std::span<const ring::RingElem> products);
// Throws PackingOverflow unless every output degree of every tile is
// below `degree` and clear of wrapped product terms.
void CheckWrap(const PackingPlan& plan, uint32_t degree);

// Single-polynomial correlated packing: x[i, j] at degree i*O + j.
ring::RingElem PackInputCorrelated(std::span<const int64_t> x, const ConvShape& shape,
                                   const ring::RingParams& params);
// w[a, b] at degree (h-1-a)*O + (h-1-b).
ring::RingElem PackKernelCorrelated(std::span<const int64_t> w, const ConvShape& shape,
                                    const ring::RingParams& params);

}  // namespace sectrain::packing

#endif  // SECTRAIN_PACKING_PLAN_H_
