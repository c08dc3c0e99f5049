#include "sectrain/packing/plan.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "sectrain/common/errors.h"
#include "sectrain/packing/tiling.h"

namespace sectrain::packing {

namespace {

struct Frame {
  int offset;
  int extract;
  int win_h;
  int win_w;
  int stride;
  bool tiled;
  bool materialize_padding;
};

PackingPlan Build(Layout layout, const ConvShape& s, uint32_t capacity, const Frame& f) {
  PackingPlan p;
  p.layout = layout;
  p.shape = s;
  p.capacity = capacity;
  p.tiled = f.tiled;
  p.offset = f.offset;
  p.extract = f.extract;
  p.win_h = f.win_h;
  p.win_w = f.win_w;
  p.stride = f.stride;

  int step_h = 1, step_w = 1, tile_cols = 1;
  if (f.tiled) {
    step_h = f.win_h - s.h + 1;
    step_w = f.win_w - s.h + 1;
    const int rows = (s.out_h() + step_h - 1) / step_h;
    tile_cols = (s.out_w() + step_w - 1) / step_w;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < tile_cols; ++c) p.tiles.push_back({r * step_h, c * step_w});
    }
  } else {
    p.tiles.push_back({0, 0});
  }

  p.coeff_map.resize(size_t(s.H) * s.W);
  p.degree_bound.assign(p.tiles.size(), 0);
  for (int i = 0; i < s.H; ++i) {
    for (int j = 0; j < s.W; ++j) {
      const int pi = i + f.offset, pj = j + f.offset;
      for (uint32_t t = 0; t < p.tiles.size(); ++t) {
        const int r = pi - p.tiles[t].row, c = pj - p.tiles[t].col;
        if (r < 0 || c < 0 || r >= f.win_h || c >= f.win_w) continue;
        const uint32_t d = uint32_t(r) * f.stride + c;
        p.coeff_map[size_t(i) * s.W + j].push_back({t, d});
        p.degree_bound[t] = std::max(p.degree_bound[t], d);
      }
    }
  }
  if (f.materialize_padding) {
    for (uint32_t t = 0; t < p.tiles.size(); ++t) {
      const int r = std::min(f.win_h, s.padded_h() - p.tiles[t].row) - 1;
      const int c = std::min(f.win_w, s.padded_w() - p.tiles[t].col) - 1;
      p.degree_bound[t] = std::max(p.degree_bound[t], uint32_t(r) * f.stride + c);
    }
  }

  p.kernel_map.resize(size_t(s.h) * s.h);
  for (int a = 0; a < s.h; ++a) {
    for (int b = 0; b < s.h; ++b) {
      p.kernel_map[size_t(a) * s.h + b] = uint32_t(s.h - 1 - a) * f.stride + (s.h - 1 - b);
    }
  }
  p.kernel_degree = uint32_t(s.h - 1) * (f.stride + 1);

  p.out_map.resize(size_t(s.out_h()) * s.out_w());
  for (int u = 0; u < s.out_h(); ++u) {
    for (int v = 0; v < s.out_w(); ++v) {
      const uint32_t t = f.tiled ? uint32_t((u / step_h) * tile_cols + v / step_w) : 0;
      const int r = u + f.extract - p.tiles[t].row;
      const int c = v + f.extract - p.tiles[t].col;
      p.out_map[size_t(u) * s.out_w() + v] = {t, uint32_t(r) * f.stride + c};
    }
  }
  return p;
}

bool WrapClear(const PackingPlan& plan, uint32_t degree, std::string* why) {
  for (const Slot& o : plan.out_map) {
    const uint64_t top = uint64_t(plan.degree_bound[o.tile]) + plan.kernel_degree;
    if (o.degree >= degree) {
      if (why) *why = "output degree " + std::to_string(o.degree) + " >= " + std::to_string(degree);
      return false;
    }
    if (top >= degree && o.degree <= top - degree) {
      if (why) {
        *why = "wrapped product terms reach output degree " + std::to_string(o.degree);
      }
      return false;
    }
  }
  return true;
}

}  // namespace

std::string_view LayoutName(Layout l) {
  return l == Layout::kBaseline ? "baseline" : "correlated";
}

Layout ParseLayout(std::string_view name) {
  if (name == "baseline") return Layout::kBaseline;
  if (name == "correlated") return Layout::kCorrelated;
  throw ParameterError("unknown packing scheme: " + std::string(name));
}

uint32_t PackingPlan::max_input_degree() const {
  return degree_bound.empty() ? 0 : *std::ranges::max_element(degree_bound);
}

PackingPlan PlanCorrelated(const ConvShape& shape, uint32_t capacity) {
  shape.Validate();
  const Frame single{0, shape.h - 1 - shape.pad, shape.H, shape.W, shape.O(), false, false};
  PackingPlan plan = Build(Layout::kCorrelated, shape, capacity, single);
  if (plan.max_input_degree() < capacity && plan.kernel_degree < capacity &&
      WrapClear(plan, capacity, nullptr)) {
    return plan;
  }
  return PlanCorrelatedTiled(shape, capacity, ChooseTiles(shape, capacity).window);
}

PackingPlan PlanCorrelatedTiled(const ConvShape& shape, uint32_t capacity, Window window) {
  shape.Validate();
  if (!WindowFeasible(shape, capacity, window)) {
    throw PartitionError("window " + std::to_string(window.h) + "x" + std::to_string(window.w) +
                         " violates the partition constraints");
  }
  const int o = std::max(window.h, window.w) + shape.h - 1;
  return Build(Layout::kCorrelated, shape, capacity,
               {shape.pad, shape.h - 1, window.h, window.w, o, true, false});
}

PackingPlan PlanBaseline(const ConvShape& shape, uint32_t capacity) {
  shape.Validate();
  const int ph = shape.padded_h(), pw = shape.padded_w();
  if (uint64_t(ph) * pw <= capacity) {
    return Build(Layout::kBaseline, shape, capacity,
                 {shape.pad, shape.h - 1, ph, pw, pw, false, true});
  }
  const int side = static_cast<int>(std::sqrt(double(capacity)));
  if (side < shape.h) {
    throw InfeasibleError("kernel side " + std::to_string(shape.h) + " exceeds window side " +
                          std::to_string(side));
  }
  const int wh = std::min(side, ph), ww = std::min(side, pw);
  return Build(Layout::kBaseline, shape, capacity,
               {shape.pad, shape.h - 1, wh, ww, ww, true, true});
}

void CheckWrap(const PackingPlan& plan, uint32_t degree) {
  std::string why;
  if (!WrapClear(plan, degree, &why)) throw PackingOverflow(why);
}

std::vector<ring::RingElem> PackInput(const PackingPlan& plan, std::span<const int64_t> x,
                                      const ring::RingParams& params) {
  if (x.size() != plan.coeff_map.size()) throw ParameterError("input size does not match plan");
  if (plan.max_input_degree() >= params.degree()) {
    throw PartitionError("input degree " + std::to_string(plan.max_input_degree()) +
                         " does not fit ring degree " + std::to_string(params.degree()));
  }
  std::vector<ring::RingElemBuilder> builders;
  for (size_t t = 0; t < plan.num_tiles(); ++t) builders.emplace_back(params);
  for (size_t e = 0; e < x.size(); ++e) {
    for (const Slot& s : plan.coeff_map[e]) builders[s.tile].SetSigned(s.degree, x[e]);
  }
  std::vector<ring::RingElem> out;
  for (auto& b : builders) out.push_back(std::move(b).Build());
  return out;
}

ring::RingElem PackKernel(const PackingPlan& plan, std::span<const int64_t> w,
                          const ring::RingParams& params) {
  if (w.size() != plan.kernel_map.size()) throw ParameterError("kernel size does not match plan");
  if (plan.kernel_degree >= params.degree()) {
    throw PartitionError("kernel degree does not fit the ring");
  }
  ring::RingElemBuilder b(params);
  for (size_t e = 0; e < w.size(); ++e) b.SetSigned(plan.kernel_map[e], w[e]);
  return std::move(b).Build();
}

std::vector<int64_t> ExtractOutput(const PackingPlan& plan,
                                   std::span<const ring::RingElem> products) {
  if (products.size() != plan.num_tiles()) {
    throw ContractError("expected one product per tile");
  }
  CheckWrap(plan, products[0].degree());
  std::vector<std::vector<int64_t>> signed_products;
  for (const auto& p : products) signed_products.push_back(p.ToSigned());
  std::vector<int64_t> out(plan.out_map.size());
  for (size_t k = 0; k < out.size(); ++k) {
    const Slot& s = plan.out_map[k];
    out[k] = signed_products[s.tile][s.degree];
  }
  return out;
}

ring::RingElem PackInputCorrelated(std::span<const int64_t> x, const ConvShape& shape,
                                   const ring::RingParams& params) {
  shape.Validate();
  if (x.size() != size_t(shape.H) * shape.W) throw ParameterError("input size mismatch");
  const uint32_t o = shape.O();
  if (uint64_t(shape.H - 1) * o + shape.W - 1 >= params.degree()) {
    throw PartitionError("input does not fit one polynomial; tile it first");
  }
  ring::RingElemBuilder b(params);
  for (int i = 0; i < shape.H; ++i) {
    for (int j = 0; j < shape.W; ++j) b.SetSigned(i * o + j, x[size_t(i) * shape.W + j]);
  }
  return std::move(b).Build();
}

ring::RingElem PackKernelCorrelated(std::span<const int64_t> w, const ConvShape& shape,
                                    const ring::RingParams& params) {
  shape.Validate();
  if (w.size() != size_t(shape.h) * shape.h) throw ParameterError("kernel size mismatch");
  const uint32_t o = shape.O();
  if (uint64_t(shape.h - 1) * (o + 1) >= params.degree()) {
    throw PartitionError("kernel does not fit the ring");
  }
  ring::RingElemBuilder b(params);
  for (int a = 0; a < shape.h; ++a) {
    for (int c = 0; c < shape.h; ++c) {
      b.SetSigned((shape.h - 1 - a) * o + (shape.h - 1 - c), w[size_t(a) * shape.h + c]);
    }
  }
  return std::move(b).Build();
}

}  // namespace sectrain::packing
