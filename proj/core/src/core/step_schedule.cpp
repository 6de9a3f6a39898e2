#include "uzawa/core/step_schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace uzawa {

StepSchedule::StepSchedule(double a, double b) : a_(a), b_(b) {
  if (!std::isfinite(a) || !(a > 0.0)) {
    throw std::invalid_argument("step schedule: a must be positive, got " + std::to_string(a));
  }
  if (!std::isfinite(b) || b < 0.0) {
    throw std::invalid_argument("step schedule: b must be nonnegative, got " + std::to_string(b));
  }
}

}  // namespace uzawa
