#include "sectrain/he/meter.h"

namespace sectrain::he {

std::string_view OpKindName(OpKind k) {
  switch (k) {
    case OpKind::kCcMul: return "ccmul";
    case OpKind::kCpMul: return "cpmul";
    case OpKind::kCcAdd: return "ccadd";
    case OpKind::kPpMul: return "ppmul";
    case OpKind::kRelin: return "relin";
    case OpKind::kEnc: return "enc";
    case OpKind::kDec: return "dec";
  }
  return "unknown";
}

void OpMeter::set_phase(Phase p) {
  std::lock_guard lock(mu_);
  phase_ = p;
}

Phase OpMeter::phase() const {
  std::lock_guard lock(mu_);
  return phase_;
}

void OpMeter::Record(OpKind kind, double seconds, uint64_t count) {
  std::lock_guard lock(mu_);
  Cell& c = table_[static_cast<int>(phase_)][static_cast<int>(kind)];
  c.count += count;
  c.seconds += seconds;
}

uint64_t OpMeter::count(OpKind kind, Phase phase) const {
  std::lock_guard lock(mu_);
  return table_[static_cast<int>(phase)][static_cast<int>(kind)].count;
}

uint64_t OpMeter::count(OpKind kind) const {
  std::lock_guard lock(mu_);
  uint64_t total = 0;
  for (const auto& row : table_) total += row[static_cast<int>(kind)].count;
  return total;
}

double OpMeter::seconds(OpKind kind, Phase phase) const {
  std::lock_guard lock(mu_);
  return table_[static_cast<int>(phase)][static_cast<int>(kind)].seconds;
}

double OpMeter::seconds(OpKind kind) const {
  std::lock_guard lock(mu_);
  double total = 0;
  for (const auto& row : table_) total += row[static_cast<int>(kind)].seconds;
  return total;
}

OpMeter::Table OpMeter::Snapshot() const {
  std::lock_guard lock(mu_);
  return table_;
}

void OpMeter::Reset() {
  std::lock_guard lock(mu_);
  table_ = {};
}

}  // namespace sectrain::he
