#include "sectrain/common/bytes.h"

#include <algorithm>
#include <string>

#include "sectrain/common/errors.h"

namespace sectrain {

void ByteWriter::PutU32(uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::PutU64(uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void ByteWriter::PutBytes(std::span<const uint8_t> bytes) {
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

void ByteWriter::PutPackedBits(std::span<const uint64_t> values, int bits) {
  const size_t start = buf_.size();
  buf_.resize(start + PackedBitsSize(values.size(), bits), 0);
  const uint64_t mask = bits >= 64 ? ~uint64_t(0) : (uint64_t(1) << bits) - 1;
  uint8_t* out = buf_.data() + start;
  unsigned __int128 acc = 0;
  int have = 0;
  for (uint64_t v : values) {
    acc |= (unsigned __int128)(v & mask) << have;
    have += bits;
    while (have >= 8) {
      *out++ = uint8_t(acc);
      acc >>= 8;
      have -= 8;
    }
  }
  if (have > 0) *out = uint8_t(acc);
}

void ByteReader::Need(size_t n) const {
  if (data_.size() - pos_ < n) {
    throw SerializationError("truncated buffer: need " + std::to_string(n) +
                             " bytes, have " + std::to_string(remaining()));
  }
}

uint8_t ByteReader::GetU8() {
  Need(1);
  return data_[pos_++];
}

uint32_t ByteReader::GetU32() {
  Need(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(data_[pos_ + i]) << (8 * i);
  pos_ += 4;
  return v;
}

uint64_t ByteReader::GetU64() {
  Need(8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= uint64_t(data_[pos_ + i]) << (8 * i);
  pos_ += 8;
  return v;
}

std::span<const uint8_t> ByteReader::GetBytes(size_t n) {
  Need(n);
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::vector<uint64_t> ByteReader::GetPackedBits(size_t count, int bits) {
  auto raw = GetBytes(PackedBitsSize(count, bits));
  std::vector<uint64_t> out(count, 0);
  const uint64_t mask = bits >= 64 ? ~uint64_t(0) : (uint64_t(1) << bits) - 1;
  unsigned __int128 acc = 0;
  int have = 0;
  size_t next = 0;
  for (size_t i = 0; i < count; ++i) {
    while (have < bits) {
      acc |= (unsigned __int128)raw[next++] << have;
      have += 8;
    }
    out[i] = uint64_t(acc) & mask;
    acc >>= bits;
    have -= bits;
  }
  return out;
}

void ByteReader::ExpectDone(std::string_view what) const {
  if (!done()) {
    throw SerializationError(std::string(what) + ": " +
                             std::to_string(remaining()) + " trailing bytes");
  }
}

bool ContainsSubsequence(std::span<const uint8_t> haystack,
                         std::span<const uint8_t> needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(),
                     needle.end()) != haystack.end();
}

}  // namespace sectrain
