#pragma once

#include <cstddef>

namespace uzawa {

/// Fine time grid of `steps` steps of length `dt` seconds, optionally grouped
/// into `slots` coarse slots of equal length (prices live on the slots).
class TimeGrid {
 public:
  /// Throws std::invalid_argument unless steps >= 1, dt > 0 and
  /// slots divides steps (slots == 0 means "one slot per step").
  TimeGrid(std::size_t steps, double dt, std::size_t slots = 0);

  std::size_t steps() const noexcept { return steps_; }
  double dt() const noexcept { return dt_; }
  std::size_t slots() const noexcept { return slots_; }
  std::size_t steps_per_slot() const noexcept { return steps_ / slots_; }
  double horizon() const noexcept { return dt_ * static_cast<double>(steps_); }
  double slot_length() const noexcept { return dt_ * static_cast<double>(steps_per_slot()); }
  std::size_t slot_of(std::size_t step) const noexcept { return step / steps_per_slot(); }

 private:
  std::size_t steps_;
  double dt_;
  std::size_t slots_;
};

}  // namespace uzawa
