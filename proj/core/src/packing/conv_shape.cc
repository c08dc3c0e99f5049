#include "sectrain/packing/conv_shape.h"

#include <string>

#include "sectrain/common/errors.h"

namespace sectrain::packing {

void ConvShape::Validate() const {
  if (h < 1 || H < 1 || W < 1) throw ParameterError("conv dimensions must be positive");
  if (pad < 0 || pad > h - 1) {
    throw ParameterError("pad must lie in [0, h-1], got " + std::to_string(pad));
  }
  if (padded_h() < h || padded_w() < h) {
    throw ParameterError("padded input smaller than the kernel");
  }
}

}  // namespace sectrain::packing
