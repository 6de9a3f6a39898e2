#pragma once

#include "uzawa/core/problem.hpp"

namespace uzawa {

/// One agent with G(u) = u^2/2 and F0(v) = (v - target)^2/2 on a single scalar
/// price; the agent's control is u = -lambda plus `noise` times a standard
/// Gaussian. Saddle point lambda* = -target/2.
ProblemInstance make_toy_problem(double target = 1.0, double noise = 0.0);

}  // namespace uzawa
