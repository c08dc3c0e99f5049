#ifndef SECTRAIN_HE_METER_H_
#define SECTRAIN_HE_METER_H_

#include <array>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <string_view>

#include "sectrain/common/phase.h"

namespace sectrain::he {

enum class OpKind : uint8_t { kCcMul, kCpMul, kCcAdd, kPpMul, kRelin, kEnc, kDec };
inline constexpr int kOpKindCount = 7;
std::string_view OpKindName(OpKind k);

// Per-phase operation counts and cumulative wall time. Safe to update from
// several threads.
class OpMeter {
 public:
  struct Cell {
    uint64_t count = 0;
    double seconds = 0;
  };
  using Table = std::array<std::array<Cell, kOpKindCount>, kPhaseCount>;

  void set_phase(Phase p);
  Phase phase() const;
  void Record(OpKind kind, double seconds, uint64_t count = 1);

  uint64_t count(OpKind kind, Phase phase) const;
  uint64_t count(OpKind kind) const;
  double seconds(OpKind kind, Phase phase) const;
  double seconds(OpKind kind) const;
  Table Snapshot() const;
  void Reset();

 private:
  mutable std::mutex mu_;
  Phase phase_ = Phase::kOnline;
  Table table_{};
};

// Records one operation of `kind` with the elapsed time on destruction.
class ScopedOp {
 public:
  ScopedOp(OpMeter* meter, OpKind kind)
      : meter_(meter), kind_(kind), start_(std::chrono::steady_clock::now()) {}
  ~ScopedOp() {
    if (meter_ == nullptr) return;
    const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start_;
    meter_->Record(kind_, d.count());
  }
  ScopedOp(const ScopedOp&) = delete;
  ScopedOp& operator=(const ScopedOp&) = delete;

 private:
  OpMeter* meter_;
  OpKind kind_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace sectrain::he

#endif  // SECTRAIN_HE_METER_H_
