#ifndef SECTRAIN_TOOLS_EXPERIMENTS_H_
#define SECTRAIN_TOOLS_EXPERIMENTS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sectrain/he/ciphertext.h"
#include "sectrain/linprot/client.h"
#include "sectrain/packing/count.h"
#include "sectrain/train/data.h"
#include "sectrain/train/model.h"
#include "sectrain/train/trainer.h"
#include "sectrain/transport/memory_channel.h"

namespace sectrain::cli {

// ---- counts

struct CountRow {
  std::string sweep;
  packing::ConvShape shape;
  int channels = 1;
  uint32_t capacity = 0;
  packing::CountReport baseline;
  packing::CountReport correlated;

  double ratio() const { return double(baseline.mults) / double(correlated.mults); }
};

// Sweeps: "toy" (2x2 input, 2x2 kernel, pad 1, capacity 9), "input"
// (5x5 kernel, inputs 8..64 step 8), "kernel" (64x64 input, kernels 3..11),
// "all". Same padding throughout. Infeasible shapes are skipped and named
// in `warnings`.
std::vector<CountRow> RunCounts(uint32_t n, const std::string& sweep, int channels,
                                std::vector<std::string>* warnings = nullptr);
void WriteCountsCsv(std::ostream& out, const std::vector<CountRow>& rows);
void WriteCountsJson(std::ostream& out, const std::vector<CountRow>& rows);

// ---- bench-he

struct BenchHeResult {
  uint32_t n = 0;
  int trials = 0;
  // Medians in milliseconds.
  double cc_mul = 0;  // tensor product and relinearization
  double cp_mul = 0;
  double cc_add = 0;
  double pp_mul = 0;
  double encrypt = 0;
  double decrypt = 0;

  double ratio() const { return cc_mul / cp_mul; }
};

// Throws ParameterError on the transparent backend.
BenchHeResult RunBenchHe(he::Backend backend, uint32_t n, int trials, uint64_t seed);
void WriteBenchHeCsv(std::ostream& out, const BenchHeResult& r);

// ---- ablate / breakdown

struct SecureRunConfig {
  he::Backend backend = he::Backend::kRlwe;
  uint32_t n = 4096;
  packing::Layout layout = packing::Layout::kCorrelated;
  train::ModelSpec model = train::TwoConvSpec(1);
  train::Dataset data;  // empty: synthetic samples matching the model
  size_t samples = 8;
  train::TrainConfig train;
  int scale = 12;
  int bits = 32;
  uint64_t seed = 1;
  transport::LinkModel link;
  bool delay = false;  // apply the link model in real time
};

struct AblateRow {
  linprot::Protocol protocol = linprot::Protocol::kDirect;
  double online_seconds = 0;   // measured wall time
  double offline_seconds = 0;
  double online_network_seconds = 0;  // link model applied to the byte counts
  double offline_network_seconds = 0;
  uint64_t bytes_online = 0;
  uint64_t bytes_offline = 0;
  uint64_t online_cc_mul = 0;
  uint64_t offline_cc_mul = 0;
  uint64_t online_cp_mul = 0;
  std::vector<int64_t> final_weights;  // flattened, for cross-protocol checks

  double online_total() const { return online_seconds + online_network_seconds; }
};

struct BreakdownRow {
  linprot::Protocol protocol = linprot::Protocol::kDirect;
  int layer = 0;
  std::string kind;
  train::Engine::LayerCost cost;
};

// One training pass over the configured samples with each protocol.
std::vector<AblateRow> RunAblate(const SecureRunConfig& config);
void WriteAblateCsv(std::ostream& out, const std::vector<AblateRow>& rows);
std::vector<BreakdownRow> RunBreakdown(const SecureRunConfig& config);
void WriteBreakdownCsv(std::ostream& out, const std::vector<BreakdownRow>& rows);

// Either the configured data or synthetic samples shaped for the model.
train::Dataset ResolveData(const SecureRunConfig& config);

}  // namespace sectrain::cli

#endif  // SECTRAIN_TOOLS_EXPERIMENTS_H_
