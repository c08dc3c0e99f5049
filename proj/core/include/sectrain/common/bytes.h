#ifndef SECTRAIN_COMMON_BYTES_H_
#define SECTRAIN_COMMON_BYTES_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace sectrain {

using Bytes = std::vector<uint8_t>;

// Little-endian append-only encoder.
class ByteWriter {
 public:
  ByteWriter() = default;
  explicit ByteWriter(size_t reserve) { buf_.reserve(reserve); }

  void PutU8(uint8_t v) { buf_.push_back(v); }
  void PutU32(uint32_t v);
  void PutU64(uint64_t v);
  void PutBytes(std::span<const uint8_t> bytes);

  // Appends `count` values of `bits` bits each, LSB first.
  void PutPackedBits(std::span<const uint64_t> values, int bits);

  size_t size() const { return buf_.size(); }
  const Bytes& bytes() const { return buf_; }
  Bytes Take() { return std::move(buf_); }

 private:
  Bytes buf_;
};

// Little-endian decoder over a borrowed buffer. Reading past the end throws
// SerializationError.
class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

  uint8_t GetU8();
  uint32_t GetU32();
  uint64_t GetU64();
  std::span<const uint8_t> GetBytes(size_t n);
  std::vector<uint64_t> GetPackedBits(size_t count, int bits);

  size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }
  // Throws unless the whole buffer was consumed.
  void ExpectDone(std::string_view what) const;

 private:
  void Need(size_t n) const;

  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

// Number of bytes PutPackedBits emits.
constexpr size_t PackedBitsSize(size_t count, int bits) {
  return (count * static_cast<size_t>(bits) + 7) / 8;
}

// True if `needle` occurs as a contiguous subsequence of `haystack`.
bool ContainsSubsequence(std::span<const uint8_t> haystack,
                         std::span<const uint8_t> needle);

}  // namespace sectrain

#endif  // SECTRAIN_COMMON_BYTES_H_
