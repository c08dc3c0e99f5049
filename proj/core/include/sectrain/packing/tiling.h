#ifndef SECTRAIN_PACKING_TILING_H_
#define SECTRAIN_PACKING_TILING_H_

#include <cstdint>

#include "sectrain/packing/conv_shape.h"
#include "sectrain/packing/plan.h"

namespace sectrain::packing {

struct TileChoice {
  Window window;
  uint64_t tiles = 0;
  // ceil(Hw*Ww/N) * floor((H-h+1)/(Hw-h+1)) * floor((W-h+1)/(Ww+h-1)),
  // evaluated as written, for comparison only.
  double window_objective = 0;
};

// Overlap-save tile count over the padded input for window (hw, ww).
uint64_t TileCount(const ConvShape& shape, Window window);
bool WindowFeasible(const ConvShape& shape, uint32_t capacity, Window window);
double WindowObjective(const ConvShape& shape, uint32_t capacity, Window window);

// Exhaustive search over h <= Hw <= H', h <= Ww <= W' subject to
// Ww + Hw * (max(Ww, Hw) + h - 1) <= capacity, minimizing TileCount. Ties go
// to the larger area, then the larger Hw. Throws InfeasibleError when no
// window satisfies the constraints.
TileChoice ChooseTiles(const ConvShape& shape, uint32_t capacity);

}  // namespace sectrain::packing

#endif  // SECTRAIN_PACKING_TILING_H_
