#include "uzawa/tcl/hjb.hpp"

#include "uzawa/core/errors.hpp"
#include "uzawa/core/noise_stream.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace uzawa {

namespace {

double max_drift(const TCLParams& p, const TCLGrid& g) {
  double m = 0.0;
  for (double x : {g.node(0), g.x_hi()}) {
    m = std::max({m, std::abs(p.drift(x, 0.0)), std::abs(p.drift(x, p.p_on))});
  }
  return m;
}

double price_at(const PriceSignal& prices, std::size_t channel, std::size_t slot) {
  return prices.values()(Eigen::Index(channel), Eigen::Index(slot));
}

}  // namespace

HJBStepping hjb_stepping(const TCLParams& params, const TCLGrid& grid, const HJBOptions& options) {
  const double s = params.sigma_per_sqrt_s();
  const double limit = grid.dx * grid.dx / (s * s + grid.dx * max_drift(params, grid));
  HJBStepping st;
  if (grid.dt <= limit * (1.0 + 1e-12)) {
    st.delta = grid.dt;
    return st;
  }
  if (!options.substep) {
    throw std::invalid_argument("hjb: time step " + std::to_string(grid.dt) + " s exceeds the stability limit " +
                                std::to_string(limit) + " s");
  }
  st.substeps = std::size_t(std::ceil(grid.dt / limit));
  st.delta = grid.dt / double(st.substeps);
  return st;
}

Transition hjb_transition(const TCLParams& params, const TCLGrid& grid, std::size_t node, double u, double delta) {
  const double s = params.sigma_per_sqrt_s();
  const double b = params.drift(grid.node(node), u);
  const double h = grid.dx;
  const double diffusion = 0.5 * s * s;
  Transition tr;
  tr.up = (diffusion + h * std::max(b, 0.0)) * delta / (h * h);
  tr.down = (diffusion + h * std::max(-b, 0.0)) * delta / (h * h);
  if (node == 0) tr.down = 0.0;
  if (node + 1 == grid.nodes) tr.up = 0.0;
  tr.stay = 1.0 - tr.up - tr.down;
  return tr;
}

double tcl_stage_rate(const TCLParams& params, double x, double u, double p, double rho) noexcept {
  return params.discomfort_rate(x) + u * (p - rho * params.response_fraction(x)) / kJoulesPerMWh;
}

namespace {

struct Candidate {
  Mode mode;
  std::vector<double> u;  // per node
};

class Solver {
 public:
  Solver(const TCLParams& p, const PriceSignal& prices, const TCLGrid& g, const HJBOptions& o)
      : p_(p), prices_(prices), g_(g), o_(o), st_(hjb_stepping(p, g, o)) {
    const std::size_t n = g.nodes;
    candidates_.push_back({Mode::Off, std::vector<double>(n, 0.0)});
    candidates_.push_back({Mode::On, std::vector<double>(n, p.p_on)});
    if (o.relaxed) {
      Candidate hold{Mode::Hold, std::vector<double>(n)};
      for (std::size_t j = 0; j < n; ++j) hold.u[j] = p.hold_control(g.node(j));
      candidates_.push_back(std::move(hold));
    }
    for (auto& c : candidates_) {
      std::vector<Transition> tr(n);
      for (std::size_t j = 0; j < n; ++j) {
        tr[j] = hjb_transition(p, g, j, c.u[j], st_.delta);
        if (!(tr[j].up >= 0.0 && tr[j].down >= 0.0 && tr[j].stay >= -1e-12 && tr[j].up <= 1.0 &&
              tr[j].down <= 1.0)) {
          throw Error("hjb: invalid transition probabilities at node " + std::to_string(j));
        }
        tr[j].stay = std::max(tr[j].stay, 0.0);
      }
      trans_.push_back(std::move(tr));
    }
  }

  OnOffPolicy run() {
    const std::size_t n = g_.nodes;
    OnOffPolicy policy(g_.steps, n);
    std::vector<double> next(n), cur(n), work(n);
    std::array<std::vector<double>, 2> scratch{std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t j = 0; j < n; ++j) next[j] = p_.terminal_cost(g_.node(j));

    // Nodes to re-verify against a direct backup.
    std::vector<std::pair<std::size_t, std::size_t>> checks;
    if (o_.dpp_checks > 0) {
      NoiseStream pick(o_.dpp_seed, {StreamTag::Test, 0, 0, 0});
      for (std::size_t i = 0; i < o_.dpp_checks; ++i) checks.emplace_back(pick.index(g_.steps), pick.index(n));
      std::sort(checks.begin(), checks.end());
    }
    std::vector<double> best(n);
    std::vector<Mode> choice(n);
    for (std::size_t t = g_.steps; t-- > 0;) {
      const std::size_t slot = t / g_.steps_per_slot();
      const double price = price_at(prices_, 0, slot);
      const double rho = price_at(prices_, 1, slot);
      for (std::size_t c = 0; c < candidates_.size(); ++c) {
        held_value(c, price, rho, next, work, scratch);
        for (std::size_t j = 0; j < n; ++j) {
          if (c == 0 || better(work[j], best[j])) {
            best[j] = work[j];
            choice[j] = candidates_[c].mode;
          }
        }
      }
      for (std::size_t j = 0; j < n; ++j) {
        cur[j] = best[j];
        policy.set(t, j, choice[j]);
      }
      auto range = std::equal_range(checks.begin(), checks.end(), std::make_pair(t, std::size_t(0)),
                                    [](auto& a, auto& b) { return a.first < b.first; });
      for (auto it = range.first; it != range.second; ++it) verify(it->second, price, rho, next, cur[it->second]);
      std::swap(cur, next);
    }
    policy.initial_value() = next;
    return policy;
  }

 private:
  bool better(double candidate, double incumbent) const {
    return candidate < incumbent - o_.tie_tolerance * std::max(std::abs(candidate), std::abs(incumbent));
  }

  // Value of holding candidate c over one decision step, then continuing with `next`.
  void held_value(std::size_t c, double price, double rho, const std::vector<double>& next, std::vector<double>& out,
                  std::array<std::vector<double>, 2>& scratch) const {
    const auto& tr = trans_[c];
    const auto& u = candidates_[c].u;
    const std::size_t n = g_.nodes;
    const std::vector<double>* src = &next;
    for (std::size_t s = 0; s < st_.substeps; ++s) {
      std::vector<double>& dst = (s + 1 == st_.substeps) ? out : scratch[s % 2];
      for (std::size_t j = 0; j < n; ++j) {
        double v = tr[j].stay * (*src)[j];
        if (j + 1 < n) v += tr[j].up * (*src)[j + 1];
        if (j > 0) v += tr[j].down * (*src)[j - 1];
        dst[j] = tcl_stage_rate(p_, g_.node(j), u[j], price, rho) * st_.delta + v;
      }
      src = &dst;
    }
  }

  // Direct backup of one node through the cone of sub-step neighbours.
  void verify(std::size_t j, double price, double rho, const std::vector<double>& next, double value) const {
    const std::size_t n = g_.nodes;
    double lowest = 0.0;
    for (std::size_t c = 0; c < candidates_.size(); ++c) {
      const std::size_t reach = st_.substeps;
      const std::size_t lo = j >= reach ? j - reach : 0;
      const std::size_t hi = std::min(n - 1, j + reach);
      std::vector<double> w(next.begin() + std::ptrdiff_t(lo), next.begin() + std::ptrdiff_t(hi) + 1);
      std::vector<double> nw(w.size());
      for (std::size_t s = 0; s < reach; ++s) {
        for (std::size_t k = lo; k <= hi; ++k) {
          const Transition tr = trans_[c][k];
          const std::size_t i = k - lo;
          double v = tr.stay * w[i];
          if (k + 1 <= hi) v += tr.up * w[i + 1];
          if (k > lo) v += tr.down * w[i - 1];
          nw[i] = tcl_stage_rate(p_, g_.node(k), candidates_[c].u[k], price, rho) * st_.delta + v;
        }
        std::swap(w, nw);
      }
      const double v = w[j - lo];
      if (c == 0 || better(v, lowest)) lowest = v;
    }
    if (std::abs(lowest - value) > 1e-10 * std::max(1.0, std::abs(value))) {
      throw Error("hjb: dynamic-programming check failed at node " + std::to_string(j));
    }
  }

  const TCLParams& p_;
  const PriceSignal& prices_;
  const TCLGrid& g_;
  const HJBOptions& o_;
  HJBStepping st_;
  std::vector<Candidate> candidates_;
  std::vector<std::vector<Transition>> trans_;
};

}  // namespace

OnOffPolicy hjb_best_response(const TCLParams& params, const PriceSignal& prices, const TCLGrid& grid,
                              const HJBOptions& options) {
  params.validate();
  grid.validate();
  if (prices.channel_count() != 2 || prices.slot_count() != grid.slots) {
    throw std::invalid_argument("hjb: prices must have channels (p, rho) over " + std::to_string(grid.slots) +
                                " slots");
  }
  if (!prices.all_finite()) throw std::invalid_argument("hjb: non-finite prices");
  return Solver(params, prices, grid, options).run();
}

}  // namespace uzawa
