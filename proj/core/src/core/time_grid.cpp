#include "uzawa/core/time_grid.hpp"

#include <cmath>
#include <stdexcept>

namespace uzawa {

TimeGrid::TimeGrid(std::size_t steps, double dt, std::size_t slots)
    : steps_(steps), dt_(dt), slots_(slots == 0 ? steps : slots) {
  if (steps_ == 0) throw std::invalid_argument("time grid: need at least one step");
  if (!std::isfinite(dt_) || !(dt_ > 0.0)) throw std::invalid_argument("time grid: dt must be positive");
  if (steps_ % slots_ != 0) throw std::invalid_argument("time grid: slots must divide the step count");
}

}  // namespace uzawa
