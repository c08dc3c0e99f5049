#ifndef SECTRAIN_LINPROT_POOL_H_
#define SECTRAIN_LINPROT_POOL_H_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sectrain/he/ciphertext.h"
#include "sectrain/he/scheme.h"
#include "sectrain/linprot/job.h"

namespace sectrain::linprot {

// Server half of one precomputed mask: [r_x], [r_w] and one [r_x * r_w]
// per term of the job, in JobShape::Terms() order.
struct MaskPair {
  uint32_t layer = 0;
  uint32_t seq = 0;
  JobShape shape;
  std::vector<he::Ciphertext> enc_left;
  std::vector<he::Ciphertext> enc_right;
  std::vector<he::Ciphertext> products;
  bool consumed = false;
};

// Server-side store keyed by (layer, sequence number).
class TriplePool {
 public:
  // Throws ParameterError on a duplicate key.
  void Add(MaskPair pair);
  // Marks the pair consumed and hands out its ciphertexts. Throws
  // PrecomputeMissing for an unknown key, SingleUseViolation if it was
  // already consumed.
  MaskPair Consume(uint32_t layer, uint32_t seq);
  const MaskPair* Find(uint32_t layer, uint32_t seq) const;

  size_t available(uint32_t layer) const;
  size_t available() const;

  void Save(const std::string& path) const;
  static TriplePool Load(const std::string& path, const he::Scheme& scheme);

 private:
  std::map<std::pair<uint32_t, uint32_t>, MaskPair> pairs_;
};

// Client half: the plaintext masks r_x (left) and r_w (right).
struct ClientMask {
  uint32_t layer = 0;
  uint32_t seq = 0;
  JobShape shape;
  std::vector<ring::RingElem> r_left;
  std::vector<ring::RingElem> r_right;
  bool consumed = false;
};

class ClientMaskStore {
 public:
  uint32_t NextSeq(uint32_t layer) const;
  // Throws ParameterError on a duplicate key.
  void Add(ClientMask mask);
  // Oldest unconsumed mask of the layer, marked consumed. Throws
  // PrecomputeMissing when none is left.
  ClientMask TakeNext(uint32_t layer);
  // Throws PrecomputeMissing or SingleUseViolation.
  ClientMask Take(uint32_t layer, uint32_t seq);

  size_t available(uint32_t layer) const;
  size_t available() const;

  void Save(const std::string& path) const;
  static ClientMaskStore Load(const std::string& path, const ring::RingParams& plain);

 private:
  std::map<std::pair<uint32_t, uint32_t>, ClientMask> masks_;
};

}  // namespace sectrain::linprot

#endif  // SECTRAIN_LINPROT_POOL_H_
