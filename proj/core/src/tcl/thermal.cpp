#include "uzawa/tcl/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace uzawa {

void TCLParams::validate() const {
  auto fail = [](const std::string& w) { throw std::invalid_argument("tcl params: " + w); };
  if (!(gamma > 0.0)) fail("gamma must be positive");
  if (!(zeta > 0.0)) fail("zeta must be positive");
  if (!(sigma >= 0.0)) fail("sigma must be nonnegative");
  if (!(p_on > 0.0)) fail("p_on must be positive");
  if (!(x_min < x_target && x_target < x_max)) fail("need x_min < x_target < x_max");
  if (!(alpha >= 0.0 && beta >= 0.0 && terminal_weight >= 0.0)) fail("weights must be nonnegative");
  if (!std::isfinite(x_off) || !std::isfinite(x0)) fail("non-finite temperature");
}

double TCLParams::discomfort_rate(double x) const noexcept {
  const double lo = std::max(0.0, x_min - x);
  const double hi = std::max(0.0, x - x_max);
  return alpha_per_s() * (x - x_target) * (x - x_target) + beta * (lo * lo + hi * hi);
}

double TCLParams::response_fraction(double x) const noexcept {
  return std::clamp((x - x_min) / (x_max - x_min), 0.0, 1.0);
}

double TCLParams::hold_control(double x) const noexcept { return std::clamp((x_off - x) / zeta, 0.0, p_on); }

TCLGrid TCLGrid::daily(double dt_target, double dx, double x_min, double x_max, double margin, double horizon_s,
                       std::size_t slots) {
  if (!(dt_target > 0.0) || !(dx > 0.0) || slots == 0 || !(horizon_s > 0.0)) {
    throw std::invalid_argument("tcl grid: invalid arguments");
  }
  TCLGrid g;
  const double slot_s = horizon_s / double(slots);
  const std::size_t per_slot = std::max<std::size_t>(1, std::size_t(std::llround(slot_s / dt_target)));
  g.dt = slot_s / double(per_slot);
  g.slots = slots;
  g.steps = per_slot * slots;
  g.dx = dx;
  g.x_lo = x_min - margin;
  g.nodes = std::size_t(std::ceil((x_max + margin - g.x_lo) / dx - 1e-9)) + 1;
  return g;
}

void TCLGrid::validate() const {
  if (!(dt > 0.0) || !(dx > 0.0) || steps == 0 || slots == 0 || nodes < 2 || steps % slots != 0) {
    throw std::invalid_argument("tcl grid: need dt, dx > 0, two or more nodes and slots dividing steps");
  }
}

std::size_t TCLGrid::nearest(double x) const noexcept {
  const double r = std::round((x - x_lo) / dx);
  if (!(r > 0.0)) return 0;
  return std::min(nodes - 1, std::size_t(r));
}

namespace {

template <class Control>
void run_path(const TCLParams& p, const TCLGrid& g, NoiseStream& stream, TCLPath& out, bool keep, Control&& control) {
  const std::size_t per = g.steps_per_slot();
  out.slot_power.assign(g.slots, 0.0);
  out.slot_response.assign(g.slots, 0.0);
  if (keep) {
    out.temperature.assign(g.steps + 1, 0.0);
    out.control.assign(g.steps, 0.0);
    out.response.assign(g.steps, 0.0);
  } else {
    out.temperature.clear();
    out.control.clear();
    out.response.clear();
  }
  const double noise = p.sigma_per_sqrt_s() * std::sqrt(g.dt);
  double x = p.x0;
  double cost = 0.0;
  for (std::size_t t = 0; t < g.steps; ++t) {
    const double u = control(t, x);
    const double r = u * p.response_fraction(x);
    if (keep) {
      out.temperature[t] = x;
      out.control[t] = u;
      out.response[t] = r;
    }
    out.slot_power[t / per] += u;
    out.slot_response[t / per] += r;
    cost += p.discomfort_rate(x) * g.dt;
    x += g.dt * p.drift(x, u);
    if (noise > 0.0) x += noise * stream.gaussian();
  }
  if (keep) out.temperature[g.steps] = x;
  for (std::size_t s = 0; s < g.slots; ++s) {
    out.slot_power[s] /= double(per);
    out.slot_response[s] /= double(per);
  }
  out.discomfort = cost + p.terminal_cost(x);
}

}  // namespace

void simulate_tcl(const TCLParams& params, const OnOffPolicy& policy, const TCLGrid& grid, NoiseStream& stream,
                  TCLPath& out, bool keep_paths) {
  if (policy.steps() != grid.steps || policy.nodes() != grid.nodes) {
    throw std::invalid_argument("simulate_tcl: policy does not match the grid");
  }
  run_path(params, grid, stream, out, keep_paths, [&](std::size_t t, double x) {
    switch (policy.at(t, grid.nearest(x))) {
      case Mode::On:
        return params.p_on;
      case Mode::Hold:
        return params.hold_control(x);
      case Mode::Off:
        break;
    }
    return 0.0;
  });
}

void simulate_hysteresis(const TCLParams& params, const TCLGrid& grid, double x_on, double x_off_threshold,
                         NoiseStream& stream, TCLPath& out, bool keep_paths) {
  bool on = !(params.x0 < x_on);
  run_path(params, grid, stream, out, keep_paths, [&](std::size_t, double x) {
    if (x >= x_on) on = true;
    if (x <= x_off_threshold) on = false;
    return on ? params.p_on : 0.0;
  });
  std::fill(out.slot_response.begin(), out.slot_response.end(), 0.0);
  if (keep_paths) std::fill(out.response.begin(), out.response.end(), 0.0);
}

}  // namespace uzawa
