#pragma once

#include <cstddef>

namespace uzawa {

/// Robbins-Monro step sizes rho_k = a / (b + k + 1) for 0-based iteration k.
///
/// With a > 0 and b >= 0 the sequence is positive, not summable and square
/// summable. Instances are immutable once constructed.
class StepSchedule {
 public:
  /// Throws std::invalid_argument unless a > 0 and b >= 0 (both finite).
  StepSchedule(double a, double b);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }

  /// Step used at 0-based iteration k.
  double rho(std::size_t k) const noexcept { return a_ / (b_ + static_cast<double>(k) + 1.0); }

 private:
  double a_;
  double b_;
};

inline double step_rho(const StepSchedule& schedule, std::size_t k) noexcept { return schedule.rho(k); }

}  // namespace uzawa
