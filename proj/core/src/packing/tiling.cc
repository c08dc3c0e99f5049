#include "sectrain/packing/tiling.h"

#include <cmath>

#include "sectrain/common/errors.h"

namespace sectrain::packing {

namespace {
uint64_t CeilDiv(uint64_t a, uint64_t b) { return (a + b - 1) / b; }
}  // namespace

uint64_t TileCount(const ConvShape& shape, Window window) {
  const uint64_t rows = CeilDiv(shape.out_h(), window.h - shape.h + 1);
  const uint64_t cols = CeilDiv(shape.out_w(), window.w - shape.h + 1);
  return rows * cols;
}

bool WindowFeasible(const ConvShape& shape, uint32_t capacity, Window window) {
  if (window.h < shape.h || window.w < shape.h) return false;
  if (window.h > shape.padded_h() || window.w > shape.padded_w()) return false;
  const uint64_t o = std::max(window.h, window.w) + shape.h - 1;
  return window.w + uint64_t(window.h) * o <= capacity;
}

double WindowObjective(const ConvShape& shape, uint32_t capacity, Window window) {
  const double hh = shape.padded_h(), ww = shape.padded_w(), k = shape.h;
  return std::ceil(double(window.h) * window.w / capacity) *
         std::floor((hh - k + 1) / (window.h - k + 1)) *
         std::floor((ww - k + 1) / (window.w + k - 1));
}

TileChoice ChooseTiles(const ConvShape& shape, uint32_t capacity) {
  shape.Validate();
  TileChoice best;
  bool found = false;
  for (int hw = shape.h; hw <= shape.padded_h(); ++hw) {
    for (int ww = shape.h; ww <= shape.padded_w(); ++ww) {
      const Window w{hw, ww};
      if (!WindowFeasible(shape, capacity, w)) continue;
      const uint64_t count = TileCount(shape, w);
      const int64_t area = int64_t(hw) * ww;
      const int64_t best_area = int64_t(best.window.h) * best.window.w;
      const bool better = !found || count < best.tiles ||
                          (count == best.tiles &&
                           (area > best_area || (area == best_area && hw > best.window.h)));
      if (better) {
        best.window = w;
        best.tiles = count;
        found = true;
      }
    }
  }
  if (!found) {
    throw InfeasibleError("no partition window fits " + std::to_string(capacity) +
                          " coefficients for kernel side " + std::to_string(shape.h));
  }
  best.window_objective = WindowObjective(shape, capacity, best.window);
  return best;
}

}  // namespace sectrain::packing
