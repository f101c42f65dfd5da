#include "mecgrid/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mecgrid {

const char* to_string(Network n) { return n == Network::ac ? "ac" : "dc"; }
const char* to_string(RenewableKind k) { return k == RenewableKind::wind ? "wind" : "solar"; }
const char* to_string(TerminalRule r) {
  return r == TerminalRule::free_terminal ? "free" : "at-least-initial";
}

double CurveSpec::operator()(double x) const {
  if (kind == Kind::quadratic) return c0 + c1 * x + c2 * x * x;
  if (samples.empty()) return 0.0;
  if (x <= samples.front().first) return samples.front().second;
  if (x >= samples.back().first) return samples.back().second;
  auto it = std::upper_bound(samples.begin(), samples.end(), x,
                             [](double v, const auto& p) { return v < p.first; });
  auto hi = *it;
  auto lo = *(it - 1);
  double t = (x - lo.first) / (hi.first - lo.first);
  return lo.second + t * (hi.second - lo.second);
}

CurveSpec CurveSpec::with_domain_scale(double scale) const {
  CurveSpec out = *this;
  if (kind == Kind::quadratic) {
    out.c1 = c1 * scale;
    out.c2 = c2 * scale * scale;
  } else {
    for (auto& p : out.samples) p.first /= scale;
  }
  return out;
}

namespace {

template <typename T>
int index_of(const std::vector<T>& v, const std::string& id) {
  for (size_t i = 0; i < v.size(); ++i)
    if (v[i].id == id) return static_cast<int>(i);
  return -1;
}

}  // namespace

int MicrogridCase::ac_hub_index(const std::string& id) const { return index_of(ac_hubs, id); }
int MicrogridCase::dc_hub_index(const std::string& id) const { return index_of(dc_hubs, id); }
int MicrogridCase::gas_hub_index(const std::string& id) const { return index_of(gas_hubs, id); }

int MicrogridCase::reference_hub_index() const {
  for (size_t i = 0; i < ac_hubs.size(); ++i)
    if (ac_hubs[i].is_reference) return static_cast<int>(i);
  return -1;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) os << v.where << ": " << v.message << "\n";
  return os.str();
}

namespace {

class Checker {
 public:
  explicit Checker(const MicrogridCase& c) : c_(c) {}

  std::vector<Violation> run() {
    check_basics();
    check_ac();
    check_dc();
    check_devices();
    check_gas();
    return std::move(out_);
  }

 private:
  void add(const std::string& where, const std::string& msg) { out_.push_back({where, msg}); }

  void check_profile(const std::string& where, const std::string& field,
                     const std::vector<double>& p, bool nonneg = true) {
    if (static_cast<int>(p.size()) != c_.horizon)
      add(where, field + " has " + std::to_string(p.size()) + " entries, expected " +
                     std::to_string(c_.horizon));
    if (nonneg)
      for (double v : p)
        if (v < 0.0) {
          add(where, field + " contains a negative entry");
          break;
        }
  }

  template <typename T>
  void check_unique_ids(const std::vector<T>& v, const std::string& what) {
    std::set<std::string> seen;
    for (const auto& e : v)
      if (!seen.insert(e.id).second) add(what + " " + e.id, "duplicate identifier");
  }

  // Samples the curve on [lo, hi] and flags decreasing values or secant slopes.
  void check_convex_nondecreasing(const std::string& where, const CurveSpec& f, double lo,
                                  double hi) {
    if (!(hi > lo)) return;  // degenerate domains reported elsewhere
    const int n = 16;
    double prev_y = f(lo), prev_x = lo, prev_slope = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= n; ++i) {
      double x = lo + (hi - lo) * i / n;
      double y = f(x);
      double slope = (y - prev_y) / (x - prev_x);
      if (slope < -1e-9 * std::max(1.0, std::abs(prev_y)))
        add(where, "curve is decreasing near x=" + std::to_string(x));
      if (slope < prev_slope - 1e-9 * std::max(1.0, std::abs(prev_slope)))
        add(where, "curve is not convex near x=" + std::to_string(x));
      prev_slope = slope;
      prev_x = x;
      prev_y = y;
    }
  }

  void check_basics() {
    if (c_.horizon < 1) add("case", "horizon must be at least 1");
    if (c_.base.power_kva <= 0.0) add("base", "base power must be positive");
    if (c_.base.pressure <= 0.0) add("base", "base pressure must be positive");
    const auto& k = c_.costs;
    if (k.voll_e < 0.0) add("costs", "voll_e must be nonnegative");
    if (k.voll_g < 0.0) add("costs", "voll_g must be nonnegative");
    if (k.beta < 0.0) add("costs", "beta must be nonnegative");
    if (k.xi < 0.0) add("costs", "xi must be nonnegative");
    if (k.pwl_segments < 1) add("costs", "pwl_segments must be at least 1");
  }

  void check_ac() {
    check_unique_ids(c_.ac_hubs, "ac hub");
    int refs = 0;
    for (const auto& h : c_.ac_hubs) {
      const std::string where = "ac hub " + h.id;
      if (!(h.v_min > 0.0 && h.v_min <= h.v_max)) add(where, "requires 0 < v_min <= v_max");
      check_profile(where, "demand_p", h.demand_p);
      check_profile(where, "demand_q", h.demand_q);
      if (h.is_reference) ++refs;
    }
    if (!c_.ac_hubs.empty() && refs != 1)
      add("ac network", "exactly one reference hub required, found " + std::to_string(refs));
    for (size_t i = 0; i < c_.ac_lines.size(); ++i) {
      const auto& l = c_.ac_lines[i];
      const std::string where = "ac line " + l.from + "-" + l.to;
      if (l.from == l.to) add(where, "endpoints coincide");
      if (c_.ac_hub_index(l.from) < 0) add(where, "unknown hub " + l.from);
      if (c_.ac_hub_index(l.to) < 0) add(where, "unknown hub " + l.to);
      if (!(l.sl_max > 0.0)) add(where, "sl_max must be positive");
    }
  }

  void check_dc() {
    check_unique_ids(c_.dc_hubs, "dc hub");
    for (const auto& h : c_.dc_hubs) {
      const std::string where = "dc hub " + h.id;
      if (!(h.v_min > 0.0 && h.v_min <= h.v_max)) add(where, "requires 0 < v_min <= v_max");
      check_profile(where, "demand_p", h.demand_p);
    }
    for (const auto& l : c_.dc_lines) {
      const std::string where = "dc line " + l.from + "-" + l.to;
      if (l.from == l.to) add(where, "endpoints coincide");
      if (c_.dc_hub_index(l.from) < 0) add(where, "unknown hub " + l.from);
      if (c_.dc_hub_index(l.to) < 0) add(where, "unknown hub " + l.to);
      if (!(l.r > 0.0)) add(where, "resistance must be positive");
      if (!(l.sl_max > 0.0)) add(where, "sl_max must be positive");
    }
  }

  void check_devices() {
    check_unique_ids(c_.inverters, "inverter");
    check_unique_ids(c_.turbines, "turbine");
    check_unique_ids(c_.renewables, "renewable");
    check_unique_ids(c_.batteries, "battery");
    for (const auto& c : c_.inverters) {
      const std::string where = "inverter " + c.id;
      if (c_.ac_hub_index(c.ac_hub) < 0) add(where, "unknown ac hub " + c.ac_hub);
      if (c_.dc_hub_index(c.dc_hub) < 0) add(where, "unknown dc hub " + c.dc_hub);
      if (c.p_min > c.p_max) add(where, "p_min exceeds p_max");
      if (c.q_min > c.q_max) add(where, "q_min exceeds q_max");
    }
    for (const auto& g : c_.turbines) {
      const std::string where = "turbine " + g.id;
      int hub = g.network == Network::ac ? c_.ac_hub_index(g.hub) : c_.dc_hub_index(g.hub);
      if (hub < 0) add(where, "unknown " + std::string(to_string(g.network)) + " hub " + g.hub);
      if (c_.gas_hub_index(g.gas_hub) < 0) add(where, "unknown gas hub " + g.gas_hub);
      if (!(g.p_min >= 0.0 && g.p_min <= g.p_max)) add(where, "requires 0 <= p_min <= p_max");
      if (g.network == Network::ac && g.q_min > g.q_max) add(where, "q_min exceeds q_max");
      check_convex_nondecreasing(where + " fuel curve", g.fuel_curve, g.p_min, g.p_max);
    }
    for (const auto& r : c_.renewables) {
      const std::string where = std::string(to_string(r.kind)) + " " + r.id;
      int hub = r.network == Network::ac ? c_.ac_hub_index(r.hub) : c_.dc_hub_index(r.hub);
      if (hub < 0) add(where, "unknown " + std::string(to_string(r.network)) + " hub " + r.hub);
      check_profile(where, "forecast", r.forecast);
    }
    for (const auto& k : c_.batteries) {
      const std::string where = "battery " + k.id;
      if (c_.dc_hub_index(k.dc_hub) < 0) add(where, "unknown dc hub " + k.dc_hub);
      if (!(k.p_ch_min >= 0.0 && k.p_ch_min <= k.p_ch_max))
        add(where, "requires 0 <= p_ch_min <= p_ch_max");
      if (!(k.p_dc_min >= 0.0 && k.p_dc_min <= k.p_dc_max))
        add(where, "requires 0 <= p_dc_min <= p_dc_max");
      if (!(k.eta_ch > 0.0 && k.eta_ch <= 1.0)) add(where, "eta_ch must be in (0, 1]");
      if (!(k.eta_dc > 0.0 && k.eta_dc <= 1.0)) add(where, "eta_dc must be in (0, 1]");
      if (!(k.e_min <= k.e_initial && k.e_initial <= k.e_max))
        add(where, "requires e_min <= e_initial <= e_max");
    }
  }

  void check_gas() {
    check_unique_ids(c_.gas_hubs, "gas hub");
    check_unique_ids(c_.pipes, "pipe");
    check_unique_ids(c_.suppliers, "supplier");
    for (const auto& h : c_.gas_hubs) {
      const std::string where = "gas hub " + h.id;
      if (!(h.pi_min > 0.0 && h.pi_min <= h.pi_max)) add(where, "requires 0 < pi_min <= pi_max");
      check_profile(where, "heat_demand", h.heat_demand);
    }
    for (const auto& p : c_.pipes) {
      const std::string where = "pipe " + p.id;
      if (p.from == p.to) add(where, "endpoints coincide");
      if (c_.gas_hub_index(p.from) < 0) add(where, "unknown gas hub " + p.from);
      if (c_.gas_hub_index(p.to) < 0) add(where, "unknown gas hub " + p.to);
      if (!(p.c_p > 0.0)) add(where, "pipeline constant must be positive");
      if (!(p.f_max > 0.0)) add(where, "f_max must be positive");
      if (!(p.pi0_from > 0.0 && p.pi0_to > 0.0)) add(where, "initial pressures must be positive");
      if (p.pi0_from == p.pi0_to)
        add(where, "equal initial pressures make the flow model singular");
    }
    for (const auto& s : c_.suppliers) {
      const std::string where = "supplier " + s.id;
      if (c_.gas_hub_index(s.gas_hub) < 0) add(where, "unknown gas hub " + s.gas_hub);
      if (!(s.v_min >= 0.0 && s.v_min <= s.v_max)) add(where, "requires 0 <= v_min <= v_max");
      check_convex_nondecreasing(where + " cost curve", s.cost_curve, s.v_min, s.v_max);
    }
  }

  const MicrogridCase& c_;
  std::vector<Violation> out_;
};

}  // namespace

ValidationReport validate_case(const MicrogridCase& c) {
  return ValidationReport{Checker(c).run()};
}

AdmittanceMatrix assemble_admittance(std::span<const LineEntry> lines, int n_hubs) {
  AdmittanceMatrix y;
  y.G = Eigen::MatrixXd::Zero(n_hubs, n_hubs);
  y.B = Eigen::MatrixXd::Zero(n_hubs, n_hubs);
  for (const auto& l : lines) {
    if (l.from < 0 || l.from >= n_hubs || l.to < 0 || l.to >= n_hubs)
      throw std::out_of_range("admittance: line endpoint out of range");
    y.G(l.from, l.from) += l.g;
    y.G(l.to, l.to) += l.g;
    y.G(l.from, l.to) -= l.g;
    y.G(l.to, l.from) -= l.g;
    y.B(l.from, l.from) += l.b;
    y.B(l.to, l.to) += l.b;
    y.B(l.from, l.to) -= l.b;
    y.B(l.to, l.from) -= l.b;
  }
  return y;
}

AdmittanceMatrix assemble_admittance(const MicrogridCase& c) {
  std::vector<LineEntry> entries;
  entries.reserve(c.ac_lines.size());
  for (const auto& l : c.ac_lines)
    entries.push_back({c.ac_hub_index(l.from), c.ac_hub_index(l.to), l.g, l.b});
  return assemble_admittance(entries, static_cast<int>(c.ac_hubs.size()));
}

namespace {

MicrogridCase scale_power(const MicrogridCase& c, double factor) {
  MicrogridCase out = c;
  auto scale = [&](double& v) { v *= factor; };
  auto scale_vec = [&](std::vector<double>& v) {
    for (double& x : v) x *= factor;
  };
  for (auto& h : out.ac_hubs) {
    scale_vec(h.demand_p);
    scale_vec(h.demand_q);
  }
  for (auto& h : out.dc_hubs) scale_vec(h.demand_p);
  for (auto& inv : out.inverters) {
    scale(inv.p_min);
    scale(inv.p_max);
    scale(inv.q_min);
    scale(inv.q_max);
  }
  for (auto& g : out.turbines) {
    scale(g.p_min);
    scale(g.p_max);
    scale(g.q_min);
    scale(g.q_max);
    // fuel output stays in Skcf/hr; only the power domain moves
    g.fuel_curve = g.fuel_curve.with_domain_scale(1.0 / factor);
  }
  for (auto& r : out.renewables) scale_vec(r.forecast);
  for (auto& k : out.batteries) {
    scale(k.p_ch_min);
    scale(k.p_ch_max);
    scale(k.p_dc_min);
    scale(k.p_dc_max);
    scale(k.e_min);
    scale(k.e_max);
    scale(k.e_initial);
  }
  return out;
}

}  // namespace

MicrogridCase to_per_unit(const MicrogridCase& c) {
  if (c.base.power_kva <= 0.0) throw std::invalid_argument("per-unit base must be positive");
  return scale_power(c, 1.0 / c.base.power_kva);
}

MicrogridCase from_per_unit(const MicrogridCase& c) {
  if (c.base.power_kva <= 0.0) throw std::invalid_argument("per-unit base must be positive");
  return scale_power(c, c.base.power_kva);
}

}  // namespace mecgrid
