#include <benchmark/benchmark.h>

#include "sectrain/common/prng.h"
#include "sectrain/linprot/job.h"
#include "sectrain/packing/count.h"
#include "sectrain/packing/tiling.h"
#include "sectrain/he/params.h"

namespace {

using namespace sectrain;

void BM_CountCorrelated(benchmark::State& state) {
  const int H = int(state.range(0)), h = int(state.range(1));
  const packing::ConvShape s{H, H, h, (h - 1) / 2};
  for (auto _ : state) benchmark::DoNotOptimize(packing::Count(s, 4096, packing::Layout::kCorrelated));
}

void BM_CountBaseline(benchmark::State& state) {
  const int H = int(state.range(0)), h = int(state.range(1));
  const packing::ConvShape s{H, H, h, (h - 1) / 2};
  for (auto _ : state) benchmark::DoNotOptimize(packing::Count(s, 4096, packing::Layout::kBaseline));
}

// Pack, multiply and extract one convolution in the plaintext ring.
void BM_ConvPackMultiply(benchmark::State& state) {
  const int H = int(state.range(0)), h = int(state.range(1));
  const auto plain = he::HeParams::Default(4096).plain;
  const linprot::ConvOp op(1, 1, {H, H, h, (h - 1) / 2},
                           state.range(2) ? packing::Layout::kCorrelated : packing::Layout::kBaseline, 4096);
  Prng rng(1);
  std::vector<int64_t> x(size_t(H) * H), w(size_t(h) * h);
  for (auto& v : x) v = int64_t(rng.Uniform(255));
  for (auto& v : w) v = int64_t(rng.Uniform(255)) - 127;
  for (auto _ : state) {
    const auto job = op.Pack(x, w, plain);
    std::vector<ring::RingElem> outs;
    for (const auto& terms : job.shape.outputs) {
      ring::RingElem acc(plain);
      for (const auto& [i, j] : terms) acc = acc + job.left[i] * job.right[j];
      outs.push_back(acc);
    }
    benchmark::DoNotOptimize(op.Extract(outs));
  }
}

BENCHMARK(BM_CountCorrelated)->Args({32, 5})->Args({64, 5})->Args({64, 11});
BENCHMARK(BM_CountBaseline)->Args({32, 5})->Args({64, 5})->Args({64, 11});
BENCHMARK(BM_ConvPackMultiply)
    ->Args({28, 5, 1})
    ->Args({28, 5, 0})
    ->Args({64, 5, 1})
    ->Args({64, 5, 0})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
