#include "sectrain/linprot/linear.h"

#include "sectrain/common/errors.h"

namespace sectrain::linprot {

LinearResult BnAffine(Client& client, Protocol protocol, uint32_t layer, const ScaleOp& op,
                      std::span<const int64_t> x, std::span<const int64_t> gamma,
                      std::span<const int64_t> beta, int shift) {
  if (beta.size() != gamma.size()) throw ParameterError("beta and gamma differ in length");
  if (shift < 0 || shift > 62) throw ParameterError("shift out of range");
  LinearResult r = RunLinear(client, protocol, layer, op, x, gamma);
  const size_t per = r.values.size() / gamma.size();
  for (size_t i = 0; i < r.values.size(); ++i) r.values[i] = (r.values[i] >> shift) + beta[i / per];
  return r;
}

}  // namespace sectrain::linprot
