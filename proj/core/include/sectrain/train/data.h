#ifndef SECTRAIN_TRAIN_DATA_H_
#define SECTRAIN_TRAIN_DATA_H_

#include <cstdint>
#include <string>
#include <vector>

namespace sectrain::train {

// Grayscale images with integer labels.
struct Dataset {
  int rows = 0;
  int cols = 0;
  int classes = 10;
  std::vector<uint8_t> pixels;  // size() x rows x cols
  std::vector<uint8_t> labels;

  size_t size() const { return labels.size(); }
  // Pixel / 255 at `scale` fractional bits.
  std::vector<int64_t> Input(size_t i, int scale) const;
  Dataset Slice(size_t begin, size_t end) const;
};

// Reads an IDX image file (magic 2051) and label file (magic 2049). At most
// `limit` samples are kept when limit > 0.
Dataset LoadIdx(const std::string& images, const std::string& labels, size_t limit = 0);

// Noisy copies of one random prototype per class.
Dataset SyntheticDataset(size_t n, int rows, int cols, int classes, uint64_t seed);

}  // namespace sectrain::train

#endif  // SECTRAIN_TRAIN_DATA_H_
