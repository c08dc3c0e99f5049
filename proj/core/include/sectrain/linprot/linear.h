#ifndef SECTRAIN_LINPROT_LINEAR_H_
#define SECTRAIN_LINPROT_LINEAR_H_

#include <cstdint>
#include <span>
#include <vector>

#include "sectrain/he/meter.h"
#include "sectrain/linprot/client.h"
#include "sectrain/linprot/job.h"
#include "sectrain/transport/endpoint.h"

namespace sectrain::linprot {

// Client-side outcome of one linear layer.
struct LinearResult {
  std::vector<int64_t> values;
  he::OpMeter::Table meter{};
  transport::CommReport comm;
};

// Packs, runs and extracts one layer. `Op` is ConvOp, MatVecOp, OuterOp or
// ScaleOp.
template <typename Op>
LinearResult RunLinear(Client& client, Protocol protocol, uint32_t layer, const Op& op,
                       std::span<const int64_t> a, std::span<const int64_t> b) {
  const LinearJob job = op.Pack(a, b, client.evaluator().params().plain);
  LinearResult r;
  r.values = op.Extract(client.Run(protocol, layer, job));
  if (client.meter()) r.meter = client.meter()->Snapshot();
  r.comm = client.channel().report();
  return r;
}

// gamma * x + beta per channel, with the product shifted right by `shift`
// bits (arithmetic) before beta is added.
LinearResult BnAffine(Client& client, Protocol protocol, uint32_t layer, const ScaleOp& op,
                      std::span<const int64_t> x, std::span<const int64_t> gamma,
                      std::span<const int64_t> beta, int shift = 0);

}  // namespace sectrain::linprot

#endif  // SECTRAIN_LINPROT_LINEAR_H_
