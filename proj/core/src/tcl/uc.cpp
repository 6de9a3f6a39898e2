#include "uzawa/tcl/uc.hpp"

#include "uzawa/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace uzawa {

namespace {

// Internal units: GW for power and thousands of GBP for cost.
constexpr double kScale = 1000.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("uc instance: " + what);
}

}  // namespace

void UCInstance::validate() const {
  require(!demand.empty(), "no slots");
  require(!technologies.empty(), "no technologies");
  require(slot_hours > 0.0, "slot_hours must be positive");
  require(population >= 0.0 && tcl_power >= 0.0, "population and tcl_power must be nonnegative");
  require(min_dispatch >= 0.0 && min_dispatch <= 1.0, "min_dispatch must lie in [0, 1]");
  for (double d : demand) require(std::isfinite(d) && d >= 0.0, "demand must be finite and nonnegative");
  for (const auto& t : technologies) {
    require(t.c1 >= 0.0 && t.c2 >= 0.0 && t.c3 >= 0.0, t.name + ": costs must be nonnegative");
    require(t.capacity.size() == demand.size(), t.name + ": capacity needs one value per slot");
    for (double g : t.capacity) require(std::isfinite(g) && g >= 0.0, t.name + ": capacity must be nonnegative");
    require(t.headroom >= 0.0 && t.headroom <= 1.0, t.name + ": headroom must lie in [0, 1]");
    require(t.slope >= 0.0 && t.slope <= 1.0, t.name + ": slope must lie in [0, 1]");
    require(t.inertia >= 0.0, t.name + ": inertia must be nonnegative");
  }
  if (frequency_response) {
    require(loss >= 0.0 && damping >= 0.0 && qss_limit >= 0.0, "loss, damping and qss_limit must be nonnegative");
    if (rocof) {
      require(nominal_frequency > 0.0 && delivery_time > 0.0 && rocof_time > 0.0 && rocof_limit > 0.0,
              "rocof parameters must be positive");
    }
  }
  if (nadir) throw CapabilityError("uc instance: the frequency-nadir constraint is not supported");
}

UCInstance desk_uc_instance() {
  UCInstance uc;
  const std::size_t slots = 48;
  uc.demand.resize(slots);
  std::vector<double> wind(slots);
  const double pi = std::acos(-1.0);
  for (std::size_t s = 0; s < slots; ++s) {
    const double h = (double(s) + 0.5) / 2.0;
    // Night trough near 04:00, evening peak near 18:00.
    const double shape = 0.5 * (1.0 - std::cos(2.0 * pi * (h - 4.0) / 24.0));
    const double evening = std::exp(-0.5 * std::pow((h - 18.0) / 2.0, 2.0));
    uc.demand[s] = 25000.0 + 9000.0 * shape + 4000.0 * evening;
    wind[s] = 9000.0 + 5000.0 * std::cos(2.0 * pi * (h - 2.0) / 24.0);
  }
  uc.technologies = {
      {"nuclear", 0.0, 10.0, 0.0, std::vector<double>(slots, 8000.0), 0.0, 0.0, 6.0},
      {"ccgt", 8.0, 45.0, 5e-4, std::vector<double>(slots, 30000.0), 0.1, 0.5, 5.0},
      {"ocgt", 4.0, 90.0, 1e-3, std::vector<double>(slots, 6000.0), 0.2, 1.0, 4.0},
      {"wind", 0.0, 0.0, 0.0, wind, 0.0, 0.0, 0.0},
  };
  return uc;
}

PriceSignal make_profile(std::size_t slots) { return PriceSignal({"U", "R"}, slots); }
PriceSignal make_prices(std::size_t slots) { return PriceSignal({"p", "rho"}, slots); }

namespace {

// Joint slot QP: variables H (Z), G (Z), R (Z), a = TCL load, b = TCL response (GW).
QPProblem joint_slot(const UCInstance& uc, std::size_t slot, double price, double rho) {
  const Eigen::Index Z = Eigen::Index(uc.technologies.size());
  const Eigen::Index n = 3 * Z + 2;
  const Eigen::Index ia = 3 * Z, ib = 3 * Z + 1;
  const double dh = uc.slot_hours;
  const bool fr = uc.frequency_response;
  const std::string tag = "[" + std::to_string(slot) + "]";

  QPProblem qp = QPProblem::with_size(n);
  qp.lower = Eigen::VectorXd::Zero(n);
  qp.upper = Eigen::VectorXd::Constant(n, kInf);

  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  auto add = [&](Eigen::VectorXd row, double b, std::string name) {
    rows.push_back(std::move(row));
    rhs.push_back(b);
    qp.in_names.push_back(std::move(name) + tag);
  };

  for (Eigen::Index j = 0; j < Z; ++j) {
    const Technology& t = uc.technologies[std::size_t(j)];
    const double gmax = t.capacity[slot] / kScale;
    qp.c[j] = t.c1 * t.capacity[slot] * dh / kScale;
    qp.c[Z + j] = t.c2 * dh;
    qp.Q(Z + j, Z + j) = 2.0 * t.c3 * kScale * dh;
    qp.upper[j] = 1.0;
    // Technologies that cannot respond get R pinned by its bound, not by rows.
    const bool responds = fr && t.headroom > 0.0 && t.slope > 0.0;
    if (!responds) qp.upper[2 * Z + j] = 0.0;

    Eigen::VectorXd cap = Eigen::VectorXd::Zero(n);
    cap[Z + j] = 1.0;
    cap[j] = -gmax;
    add(cap, 0.0, "capacity:" + t.name);
    if (responds) {
      Eigen::VectorXd head = Eigen::VectorXd::Zero(n);
      head[2 * Z + j] = 1.0;
      head[j] = -t.headroom * gmax;
      add(head, 0.0, "headroom:" + t.name);
      Eigen::VectorXd slope = Eigen::VectorXd::Zero(n);
      slope[2 * Z + j] = 1.0;
      slope[j] = -t.slope * gmax;
      slope[Z + j] = t.slope;
      add(slope, 0.0, "slope:" + t.name);
    }
    if (uc.min_dispatch * t.headroom > 0.0) {
      Eigen::VectorXd md = Eigen::VectorXd::Zero(n);
      md[j] = uc.min_dispatch * t.headroom * gmax;
      md[Z + j] = -1.0;
      add(md, 0.0, "min_dispatch:" + t.name);
    }
  }

  const double loss = uc.loss / kScale;
  const double demand = uc.demand[slot] / kScale;
  if (fr) {
    const double k = uc.damping * uc.qss_limit;
    Eigen::VectorXd qss = Eigen::VectorXd::Zero(n);
    qss.segment(2 * Z, Z).setConstant(-1.0);
    qss[ia] = -k;
    qss[ib] = -(1.0 - k);
    add(qss, -loss + k * demand, "qss_response");
    if (uc.rocof) {
      const double tr = uc.rocof_time, td = uc.delivery_time, df = uc.rocof_limit, f0 = uc.nominal_frequency;
      Eigen::VectorXd rf = Eigen::VectorXd::Zero(n);
      rf.segment(2 * Z, Z).setConstant(-tr * tr);
      rf[ib] = -tr * tr;
      for (Eigen::Index j = 0; j < Z; ++j) {
        const Technology& t = uc.technologies[std::size_t(j)];
        rf[j] = -4.0 * df * td * t.inertia * (t.capacity[slot] / kScale) / f0;
      }
      add(rf, -2.0 * loss * tr * td - 4.0 * df * td * uc.loss_inertia * loss / f0, "rocof");
    }
  }
  // Response offered by TCLs cannot exceed their load.
  Eigen::VectorXd rb = Eigen::VectorXd::Zero(n);
  rb[ib] = 1.0;
  rb[ia] = -1.0;
  add(rb, 0.0, "tcl_response");

  qp.A_in.resize(Eigen::Index(rows.size()), n);
  qp.b_in.resize(Eigen::Index(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    qp.A_in.row(Eigen::Index(i)) = rows[i].transpose();
    qp.b_in[Eigen::Index(i)] = rhs[i];
  }

  qp.A_eq = Eigen::MatrixXd::Zero(1, n);
  qp.A_eq.block(0, Z, 1, Z).setConstant(1.0);
  qp.A_eq(0, ia) = -1.0;
  qp.b_eq = Eigen::VectorXd::Constant(1, demand);
  qp.eq_names = {"balance" + tag};

  qp.upper[ia] = uc.tcl_megawatts(uc.tcl_power) / kScale;
  qp.c[ia] = -price * dh;
  qp.c[ib] = rho * dh;
  return qp;
}

// Removes the profile columns, moving fixed values to the right-hand sides.
QPProblem fix_profile(const QPProblem& joint, double a, double b) {
  const Eigen::Index n = joint.size() - 2;
  QPProblem qp;
  qp.Q = joint.Q.topLeftCorner(n, n);
  qp.c = joint.c.head(n);
  qp.A_eq = joint.A_eq.leftCols(n);
  qp.b_eq = joint.b_eq - joint.A_eq.col(n) * a - joint.A_eq.col(n + 1) * b;
  // Drop the tcl_response row, which only involves the profile.
  const Eigen::Index m = joint.A_in.rows() - 1;
  qp.A_in = joint.A_in.topLeftCorner(m, n);
  qp.b_in = joint.b_in.head(m) - joint.A_in.col(n).head(m) * a - joint.A_in.col(n + 1).head(m) * b;
  qp.lower = joint.lower.head(n);
  qp.upper = joint.upper.head(n);
  qp.eq_names = joint.eq_names;
  qp.in_names.assign(joint.in_names.begin(), joint.in_names.begin() + m);
  return qp;
}

void check_profile(const UCInstance& uc, const PriceSignal& profile) {
  if (profile.channel_count() != 2 || profile.slot_count() != uc.slots()) {
    throw std::invalid_argument("uc: profile must have channels (U, R) over " + std::to_string(uc.slots()) +
                                " slots");
  }
  if (!profile.all_finite()) throw std::invalid_argument("uc: non-finite profile");
}

void record(const UCInstance& uc, std::size_t s, const Eigen::VectorXd& x, double tcl_mw, Dispatch& d) {
  const std::size_t Z = uc.technologies.size();
  double total = 0.0;
  for (std::size_t j = 0; j < Z; ++j) {
    d.commitment[s * Z + j] = x[Eigen::Index(j)];
    d.generation[s * Z + j] = x[Eigen::Index(Z + j)] * kScale;
    d.response[s * Z + j] = x[Eigen::Index(2 * Z + j)] * kScale;
    total += d.generation[s * Z + j];
  }
  d.max_balance_residual = std::max(d.max_balance_residual, std::abs(total - uc.demand[s] - tcl_mw));
}

Dispatch empty_dispatch(const UCInstance& uc) {
  Dispatch d;
  d.slots = uc.slots();
  d.technologies = uc.technologies.size();
  d.commitment.assign(d.slots * d.technologies, 0.0);
  d.generation = d.commitment;
  d.response = d.commitment;
  return d;
}

}  // namespace

QPProblem uc_slot_qp(const UCInstance& uc, std::size_t slot, double tcl_load_mw, double tcl_response_mw, bool joint,
                     double price, double rho) {
  if (slot >= uc.slots()) throw std::out_of_range("uc_slot_qp: slot out of range");
  QPProblem qp = joint_slot(uc, slot, price, rho);
  if (joint) return qp;
  return fix_profile(qp, tcl_load_mw / kScale, tcl_response_mw / kScale);
}

UCResult uc_cost(const UCInstance& uc, const PriceSignal& profile, const QPOptions& options) {
  uc.validate();
  check_profile(uc, profile);
  UCResult out;
  out.dispatch = empty_dispatch(uc);
  for (std::size_t s = 0; s < uc.slots(); ++s) {
    const double a = uc.tcl_megawatts(profile(0, s));
    const double b = uc.tcl_megawatts(profile(1, s));
    const QPSolution sol = qp_solve(uc_slot_qp(uc, s, a, b), options);
    out.cost += sol.objective * kScale;
    record(uc, s, sol.x, a, out.dispatch);
  }
  return out;
}

UCResponse aggregate_response(const UCInstance& uc, const PriceSignal& prices, const QPOptions& options) {
  uc.validate();
  if (prices.channel_count() != 2 || prices.slot_count() != uc.slots()) {
    throw std::invalid_argument("uc: prices must have channels (p, rho) over " + std::to_string(uc.slots()) +
                                " slots");
  }
  if (!prices.all_finite()) throw std::invalid_argument("uc: non-finite prices");
  UCResponse out{make_profile(uc.slots()), 0.0, empty_dispatch(uc)};
  const std::size_t Z = uc.technologies.size();
  const double per_tcl = uc.population > 0.0 ? 1.0 / uc.tcl_megawatts(1.0) : 0.0;
  for (std::size_t s = 0; s < uc.slots(); ++s) {
    const QPSolution sol = qp_solve(uc_slot_qp(uc, s, 0.0, 0.0, true, prices(0, s), prices(1, s)), options);
    const double a = sol.x[Eigen::Index(3 * Z)] * kScale;
    const double b = sol.x[Eigen::Index(3 * Z + 1)] * kScale;
    double u = std::clamp(a * per_tcl, 0.0, uc.tcl_power);
    out.profile.values()(0, Eigen::Index(s)) = u;
    out.profile.values()(1, Eigen::Index(s)) = std::clamp(b * per_tcl, 0.0, u);
    out.objective += sol.objective * kScale;
    record(uc, s, sol.x, a, out.dispatch);
  }
  return out;
}

PriceSignal uc_marginal_prices(const UCInstance& uc, const PriceSignal& profile, const QPOptions& options) {
  uc.validate();
  check_profile(uc, profile);
  PriceSignal prices = make_prices(uc.slots());
  const Eigen::Index n = Eigen::Index(3 * uc.technologies.size());
  for (std::size_t s = 0; s < uc.slots(); ++s) {
    const QPProblem joint = joint_slot(uc, s, 0.0, 0.0);
    const double a = uc.tcl_megawatts(profile(0, s)) / kScale;
    const double b = uc.tcl_megawatts(profile(1, s)) / kScale;
    const QPSolution sol = qp_solve(fix_profile(joint, a, b), options);
    const Eigen::Index m = joint.A_in.rows() - 1;
    // d cost / d rhs = -multiplier, and the rhs moves by -column * profile.
    const double dA = sol.y.dot(joint.A_eq.col(n)) + sol.z.dot(joint.A_in.col(n).head(m));
    const double dB = sol.y.dot(joint.A_eq.col(n + 1)) + sol.z.dot(joint.A_in.col(n + 1).head(m));
    prices.values()(0, Eigen::Index(s)) = dA / uc.slot_hours;
    prices.values()(1, Eigen::Index(s)) = -dB / uc.slot_hours;
  }
  return prices;
}

}  // namespace uzawa
