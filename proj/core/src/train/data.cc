#include "sectrain/train/data.h"

#include <algorithm>
#include <fstream>

#include "sectrain/common/errors.h"
#include "sectrain/common/prng.h"
#include "sectrain/train/fixed.h"

namespace sectrain::train {

namespace {

uint32_t ReadBe32(std::istream& in, const std::string& path) {
  uint8_t b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw SerializationError("truncated IDX header in " + path);
  return uint32_t(b[0]) << 24 | uint32_t(b[1]) << 16 | uint32_t(b[2]) << 8 | b[3];
}

std::vector<uint8_t> ReadIdx(const std::string& path, uint32_t magic, std::vector<uint32_t>& dims) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open " + path);
  if (ReadBe32(in, path) != magic) throw SerializationError("bad IDX magic in " + path);
  const int ndims = magic & 0xff;
  size_t total = 1;
  dims.clear();
  for (int i = 0; i < ndims; ++i) {
    dims.push_back(ReadBe32(in, path));
    total *= dims.back();
  }
  std::vector<uint8_t> data(total);
  if (!in.read(reinterpret_cast<char*>(data.data()), std::streamsize(total))) {
    throw SerializationError("truncated IDX data in " + path);
  }
  return data;
}

}  // namespace

std::vector<int64_t> Dataset::Input(size_t i, int scale) const {
  const size_t n = size_t(rows) * cols;
  std::vector<int64_t> x(n);
  for (size_t j = 0; j < n; ++j) x[j] = ToFixed(pixels.at(i * n + j) / 255.0, scale);
  return x;
}

Dataset Dataset::Slice(size_t begin, size_t end) const {
  end = std::min(end, size());
  if (begin > end) throw ParameterError("bad dataset slice");
  Dataset d{rows, cols, classes, {}, {}};
  const size_t n = size_t(rows) * cols;
  d.pixels.assign(pixels.begin() + begin * n, pixels.begin() + end * n);
  d.labels.assign(labels.begin() + begin, labels.begin() + end);
  return d;
}

Dataset LoadIdx(const std::string& images, const std::string& labels, size_t limit) {
  std::vector<uint32_t> idims, ldims;
  Dataset d;
  d.pixels = ReadIdx(images, 0x00000803, idims);
  d.labels = ReadIdx(labels, 0x00000801, ldims);
  if (idims[0] != ldims[0]) throw SerializationError("image and label counts differ");
  d.rows = int(idims[1]);
  d.cols = int(idims[2]);
  if (limit > 0 && limit < d.labels.size()) d = d.Slice(0, limit);
  for (uint8_t l : d.labels) {
    if (l >= d.classes) throw SerializationError("label out of range");
  }
  return d;
}

Dataset SyntheticDataset(size_t n, int rows, int cols, int classes, uint64_t seed) {
  if (classes < 2 || rows <= 0 || cols <= 0) throw ParameterError("bad synthetic dataset shape");
  Prng rng(seed, {0x73796e7468});
  const size_t px = size_t(rows) * cols;
  std::vector<uint8_t> protos(px * classes);
  for (auto& p : protos) p = rng.Uniform(4) == 0 ? uint8_t(160 + rng.Uniform(96)) : 0;
  Dataset d{rows, cols, classes, std::vector<uint8_t>(n * px), std::vector<uint8_t>(n)};
  for (size_t i = 0; i < n; ++i) {
    const int label = int(rng.Uniform(classes));
    d.labels[i] = uint8_t(label);
    for (size_t j = 0; j < px; ++j) {
      const int v = protos[label * px + j] + int(rng.Uniform(61)) - 30;
      d.pixels[i * px + j] = uint8_t(std::clamp(v, 0, 255));
    }
  }
  return d;
}

}  // namespace sectrain::train
