#ifndef SECTRAIN_COMMON_ERRORS_H_
#define SECTRAIN_COMMON_ERRORS_H_

#include <stdexcept>
#include <string>

namespace sectrain {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or mismatched parameters (ring degree, moduli, shapes).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// An operation was called outside its contract (e.g. CPMul on a
// 3-component ciphertext).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Noise estimate exceeded the decryption bound.
class DecryptionFailure : public Error {
 public:
  using Error::Error;
};

// Packing: a tile does not fit the polynomial capacity.
class PartitionError : public Error {
 public:
  using Error::Error;
};

// Packing: a product wrapped onto degrees that the extraction reads.
class PackingOverflow : public Error {
 public:
  using Error::Error;
};

// No feasible partition window exists.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Peer misbehaved or the two parties fell out of step.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class ChannelClosed : public Error {
 public:
  using Error::Error;
};

// Online phase asked for a mask pair that was never precomputed.
class PrecomputeMissing : public Error {
 public:
  using Error::Error;
};

// A mask pair was consumed twice.
class SingleUseViolation : public Error {
 public:
  using Error::Error;
};

// Fixed-point value left its representable range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// Malformed bytes on a wire or in a file.
class SerializationError : public Error {
 public:
  using Error::Error;
};

}  // namespace sectrain

#endif  // SECTRAIN_COMMON_ERRORS_H_
