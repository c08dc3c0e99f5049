#include "sectrain/packing/count.h"

#include <algorithm>
#include <json.hpp>

#include "sectrain/packing/tiling.h"

namespace sectrain::packing {

int64_t AnalyticN1(int H, int h) {
  const int64_t half = (h - 1) / 2;
  return (half + H - 1) * (H + h - 1) + H + half;
}

int64_t AnalyticN2(int H, int h) { return int64_t(H + h - 1) * (H - 1); }

int64_t AnalyticDifference(int H, int h) {
  return int64_t((h + 1) / 2) * H + int64_t((h - 1) / 2) * h;
}

CountReport Count(const ConvShape& shape, uint32_t capacity, Layout layout, int c_in,
                  int c_out) {
  const PackingPlan plan = layout == Layout::kCorrelated ? PlanCorrelated(shape, capacity)
                                                         : PlanBaseline(shape, capacity);
  CountReport r;
  r.layout = layout;
  r.input_polys = plan.num_tiles() * uint64_t(c_in);
  r.kernel_polys = uint64_t(c_in) * c_out;
  r.mults = plan.num_tiles() * uint64_t(c_in) * c_out;
  r.n1 = AnalyticN1(shape.H, shape.h);
  r.n2 = AnalyticN2(shape.H, shape.h);
  r.max_degree = plan.max_input_degree();
  r.kernel_max_degree = plan.kernel_degree;
  if (layout == Layout::kCorrelated) {
    r.untiled_degree = uint64_t(shape.H - 1) * shape.O() + shape.W - 1;
  } else {
    r.untiled_degree = uint64_t(shape.padded_h()) * shape.padded_w() - 1;
  }
  r.tiled = plan.tiled;
  r.window = {plan.win_h, plan.win_w};
  r.window_objective = WindowObjective(shape, capacity, r.window);
  r.used_outputs = plan.out_map.size();
  for (uint32_t b : plan.degree_bound) {
    r.product_terms += std::min<uint64_t>(uint64_t(b) + plan.kernel_degree + 1, capacity);
  }
  r.trivial = shape.h == 1;
  return r;
}

std::string CountReport::ToJson() const {
  nlohmann::json j;
  j["scheme"] = std::string(LayoutName(layout));
  j["mults"] = mults;
  j["input_polys"] = input_polys;
  j["kernel_polys"] = kernel_polys;
  j["n1"] = n1;
  j["n2"] = n2;
  j["max_degree"] = max_degree;
  j["kernel_max_degree"] = kernel_max_degree;
  j["untiled_degree"] = untiled_degree;
  j["window"] = {window.h, window.w};
  j["window_objective"] = window_objective;
  j["used_outputs"] = used_outputs;
  j["product_terms"] = product_terms;
  j["trivial"] = trivial;
  return j.dump();
}

}  // namespace sectrain::packing
