#include "mecgrid/analysis.hpp"

#include "mecgrid/gasflow.hpp"
#include "mecgrid/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mecgrid {

namespace {

PwlCurve curve_or_point(const CurveSpec& spec, double lo, double hi, int segments) {
  if (hi > lo) return pwl_approximate([&](double x) { return spec(x); }, lo, hi, segments);
  PwlCurve c;
  c.breakpoints.push_back({lo, spec(lo)});
  return c;
}

double pwl_value(const PwlCurve& c, double x) {
  if (c.segments() < 1) return c.breakpoints.front().y;
  return pwl_evaluate(c, x);
}

struct Worst {
  double best = 0.0;
  std::string where;
  void offer(double v, const std::string& what, const std::string& id, int t) {
    if (std::abs(v) > best) {
      best = std::abs(v);
      where = what + "[" + id + "," + std::to_string(t) + "]";
    }
  }
};

}  // namespace

double BalanceResiduals::max_abs() const {
  return std::max(std::max(ac_active, ac_reactive), std::max(dc, gas));
}

BalanceResiduals balance_residuals(const MicrogridCase& c, const DispatchSchedule& s) {
  BalanceResiduals out;
  Worst worst;
  const int T = s.horizon;
  std::vector<PwlCurve> fuel;
  fuel.reserve(c.turbines.size());
  for (const auto& mt : c.turbines)
    fuel.push_back(curve_or_point(mt.fuel_curve, mt.p_min, mt.p_max, c.costs.pwl_segments));

  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < (int)c.ac_hubs.size(); ++j) {
      double p = -s.value(EntityKind::ac_hub, j, Quantity::Pd, t);
      double q = -s.value(EntityKind::ac_hub, j, Quantity::Qd, t);
      for (int g = 0; g < (int)c.turbines.size(); ++g) {
        if (c.turbines[g].network != Network::ac || c.ac_hub_index(c.turbines[g].hub) != j)
          continue;
        p += s.value(EntityKind::turbine, g, Quantity::Pg, t);
        q += s.value(EntityKind::turbine, g, Quantity::Qg, t);
      }
      for (int r = 0; r < (int)c.renewables.size(); ++r) {
        const auto& ru = c.renewables[r];
        if (ru.network != Network::ac || c.ac_hub_index(ru.hub) != j) continue;
        const bool wind = ru.kind == RenewableKind::wind;
        p += s.value(EntityKind::renewable, r, wind ? Quantity::Pw : Quantity::Ps, t);
        q += s.value(EntityKind::renewable, r, wind ? Quantity::Qw : Quantity::Qs, t);
      }
      for (int i = 0; i < (int)c.inverters.size(); ++i) {
        if (c.ac_hub_index(c.inverters[i].ac_hub) != j) continue;
        p += s.value(EntityKind::inverter, i, Quantity::Pc, t);
        q += s.value(EntityKind::inverter, i, Quantity::Qc, t);
      }
      for (int l = 0; l < (int)c.ac_lines.size(); ++l) {
        const auto& line = c.ac_lines[l];
        if (c.ac_hub_index(line.from) == j) {
          p -= s.value(EntityKind::ac_line, l, Quantity::PL, t);
          q -= s.value(EntityKind::ac_line, l, Quantity::QL, t);
        } else if (c.ac_hub_index(line.to) == j) {
          p += s.value(EntityKind::ac_line, l, Quantity::PL, t);
          q += s.value(EntityKind::ac_line, l, Quantity::QL, t);
        }
      }
      out.ac_active = std::max(out.ac_active, std::abs(p));
      out.ac_reactive = std::max(out.ac_reactive, std::abs(q));
      worst.offer(p, "acP", c.ac_hubs[j].id, t);
      worst.offer(q, "acQ", c.ac_hubs[j].id, t);
    }

    for (int j = 0; j < (int)c.dc_hubs.size(); ++j) {
      double p = -s.value(EntityKind::dc_hub, j, Quantity::Pd, t);
      for (int g = 0; g < (int)c.turbines.size(); ++g)
        if (c.turbines[g].network == Network::dc && c.dc_hub_index(c.turbines[g].hub) == j)
          p += s.value(EntityKind::turbine, g, Quantity::Pg, t);
      for (int r = 0; r < (int)c.renewables.size(); ++r) {
        const auto& ru = c.renewables[r];
        if (ru.network != Network::dc || c.dc_hub_index(ru.hub) != j) continue;
        p += s.value(EntityKind::renewable, r,
                     ru.kind == RenewableKind::wind ? Quantity::Pw : Quantity::Ps, t);
      }
      for (int i = 0; i < (int)c.inverters.size(); ++i)
        if (c.dc_hub_index(c.inverters[i].dc_hub) == j)
          p -= s.value(EntityKind::inverter, i, Quantity::Pc, t);
      for (int k = 0; k < (int)c.batteries.size(); ++k) {
        if (c.dc_hub_index(c.batteries[k].dc_hub) != j) continue;
        p += s.value(EntityKind::battery, k, Quantity::Pdc, t);
        p -= s.value(EntityKind::battery, k, Quantity::Pch, t);
      }
      for (int l = 0; l < (int)c.dc_lines.size(); ++l) {
        const auto& line = c.dc_lines[l];
        if (c.dc_hub_index(line.from) == j)
          p -= s.value(EntityKind::dc_line, l, Quantity::PL, t);
        else if (c.dc_hub_index(line.to) == j)
          p += s.value(EntityKind::dc_line, l, Quantity::PL, t);
      }
      out.dc = std::max(out.dc, std::abs(p));
      worst.offer(p, "dc", c.dc_hubs[j].id, t);
    }

    for (int n = 0; n < (int)c.gas_hubs.size(); ++n) {
      double f = -s.value(EntityKind::gas_hub, n, Quantity::Gd, t);
      for (int sp = 0; sp < (int)c.suppliers.size(); ++sp)
        if (c.gas_hub_index(c.suppliers[sp].gas_hub) == n)
          f += s.value(EntityKind::supplier, sp, Quantity::Vgs, t);
      for (int g = 0; g < (int)c.turbines.size(); ++g)
        if (c.gas_hub_index(c.turbines[g].gas_hub) == n)
          f -= pwl_value(fuel[g], s.value(EntityKind::turbine, g, Quantity::Pg, t));
      for (int q = 0; q < (int)c.pipes.size(); ++q) {
        const auto& pipe = c.pipes[q];
        if (c.gas_hub_index(pipe.from) == n)
          f -= s.value(EntityKind::pipe, q, Quantity::Fp, t);
        else if (c.gas_hub_index(pipe.to) == n)
          f += s.value(EntityKind::pipe, q, Quantity::Fp, t);
      }
      out.gas = std::max(out.gas, std::abs(f));
      worst.offer(f, "gas", c.gas_hubs[n].id, t);
    }
  }
  out.worst = worst.where;
  return out;
}

std::vector<std::vector<double>> weymouth_error(const MicrogridCase& c,
                                                const DispatchSchedule& s) {
  std::vector<std::vector<double>> err(c.pipes.size(), std::vector<double>(s.horizon, 0.0));
  for (int q = 0; q < (int)c.pipes.size(); ++q) {
    const auto& pipe = c.pipes[q];
    const int n = c.gas_hub_index(pipe.from);
    const int m = c.gas_hub_index(pipe.to);
    for (int t = 0; t < s.horizon; ++t) {
      const double f_lin = s.value(EntityKind::pipe, q, Quantity::Fp, t);
      const double pn = s.value(EntityKind::gas_hub, n, Quantity::Pi, t);
      const double pm = s.value(EntityKind::gas_hub, m, Quantity::Pi, t);
      err[q][t] = f_lin - weymouth_flow(pipe.c_p, pn, pm);
    }
  }
  return err;
}

double SummaryMetrics::cost_total(const CostParams& k) const {
  return fuel_cost + k.voll_e * lost_load_kwh + k.voll_g * lost_heat_skcf + degradation_cost;
}

SummaryMetrics compute_metrics(const MicrogridCase& c, const DispatchSchedule& s) {
  SummaryMetrics m;
  m.status = s.status;
  m.objective_cost = s.objective;
  const int T = s.horizon;
  m.hourly_lost_load_kw.assign(T, 0.0);
  m.hourly_heat_served_skcf.assign(T, 0.0);
  m.hourly_generation_kw.assign(T, 0.0);
  m.hourly_discharge_kw.assign(T, 0.0);

  std::vector<PwlCurve> cost;
  cost.reserve(c.suppliers.size());
  for (const auto& gs : c.suppliers)
    cost.push_back(curve_or_point(gs.cost_curve, gs.v_min, gs.v_max, c.costs.pwl_segments));

  double heat_total = 0.0;
  for (int t = 0; t < T; ++t) {
    double lost_t = 0.0;
    for (int j = 0; j < (int)c.ac_hubs.size(); ++j)
      lost_t += c.ac_hubs[j].demand_p[t] - s.value(EntityKind::ac_hub, j, Quantity::Pd, t);
    for (int j = 0; j < (int)c.dc_hubs.size(); ++j)
      lost_t += c.dc_hubs[j].demand_p[t] - s.value(EntityKind::dc_hub, j, Quantity::Pd, t);
    // snap solver round-off so a fully served hour reads exactly zero
    if (std::abs(lost_t) < 1e-7) lost_t = 0.0;
    m.hourly_lost_load_kw[t] = lost_t;
    for (int n = 0; n < (int)c.gas_hubs.size(); ++n) {
      heat_total += c.gas_hubs[n].heat_demand[t];
      const double gd = s.value(EntityKind::gas_hub, n, Quantity::Gd, t);
      m.hourly_heat_served_skcf[t] += gd;
      double deficit = c.gas_hubs[n].heat_demand[t] - gd;
      if (std::abs(deficit) < 1e-7) deficit = 0.0;
      m.lost_heat_skcf += deficit;
    }
    for (int g = 0; g < (int)c.turbines.size(); ++g)
      m.hourly_generation_kw[t] += s.value(EntityKind::turbine, g, Quantity::Pg, t);
    for (int r = 0; r < (int)c.renewables.size(); ++r)
      m.hourly_generation_kw[t] += s.value(
          EntityKind::renewable, r,
          c.renewables[r].kind == RenewableKind::wind ? Quantity::Pw : Quantity::Ps, t);
    for (int k = 0; k < (int)c.batteries.size(); ++k)
      m.hourly_discharge_kw[t] += s.value(EntityKind::battery, k, Quantity::Pdc, t);
    for (int sp = 0; sp < (int)c.suppliers.size(); ++sp)
      m.fuel_cost += pwl_value(cost[sp], s.value(EntityKind::supplier, sp, Quantity::Vgs, t));

    m.lost_load_kwh += m.hourly_lost_load_kw[t];
    m.degradation_cost += c.costs.beta * m.hourly_discharge_kw[t];
    m.total_generation_kwh += m.hourly_generation_kw[t];
  }
  if (m.lost_load_kwh < 0.0 && m.lost_load_kwh > -1e-6) m.lost_load_kwh = 0.0;
  if (m.lost_heat_skcf < 0.0 && m.lost_heat_skcf > -1e-6) m.lost_heat_skcf = 0.0;
  const double served = heat_total - m.lost_heat_skcf;
  m.heat_served_fraction = heat_total > 0.0 ? served / heat_total : 1.0;
  return m;
}

namespace {

template <typename T>
double* field_ptr(T& item, const std::string& field,
                  std::initializer_list<std::pair<const char*, double T::*>> fields) {
  for (const auto& [name, ptr] : fields)
    if (field == name) return &(item.*ptr);
  return nullptr;
}

template <typename Vec>
std::vector<double*> collect(Vec& vec, const std::string& sel, const std::string& field,
                             const std::string& path, auto getter) {
  std::vector<double*> out;
  if (sel == "*") {
    for (auto& item : vec) {
      double* p = getter(item, field);
      if (!p) throw std::invalid_argument("unknown field \"" + field + "\" in path " + path);
      out.push_back(p);
    }
    if (out.empty()) throw std::invalid_argument("empty collection in path " + path);
    return out;
  }
  size_t pos = 0;
  int idx = -1;
  try {
    idx = std::stoi(sel, &pos);
  } catch (const std::exception&) {
  }
  if (pos != sel.size() || idx < 0 || idx >= (int)vec.size())
    throw std::invalid_argument("bad index \"" + sel + "\" in path " + path);
  double* p = getter(vec[idx], field);
  if (!p) throw std::invalid_argument("unknown field \"" + field + "\" in path " + path);
  out.push_back(p);
  return out;
}

}  // namespace

std::vector<double*> resolve_parameter(MicrogridCase& c, const std::string& path) {
  if (path.rfind("costs.", 0) == 0) {
    const std::string f = path.substr(6);
    double* p = field_ptr(c.costs, f,
                          {{"voll_e", &CostParams::voll_e},
                           {"voll_g", &CostParams::voll_g},
                           {"beta", &CostParams::beta},
                           {"xi", &CostParams::xi}});
    if (!p) throw std::invalid_argument("unknown field \"" + f + "\" in path " + path);
    return {p};
  }
  const auto lb = path.find('[');
  const auto rb = path.find(']');
  const auto dot = path.find('.', rb == std::string::npos ? 0 : rb);
  if (lb == std::string::npos || rb == std::string::npos || dot == std::string::npos ||
      !(lb < rb && rb < dot))
    throw std::invalid_argument("parameter path must look like collection[i].field: " + path);
  const std::string coll = path.substr(0, lb);
  const std::string sel = path.substr(lb + 1, rb - lb - 1);
  const std::string field = path.substr(dot + 1);

  if (coll == "inverters")
    return collect(c.inverters, sel, field, path, [](Inverter& x, const std::string& f) {
      return field_ptr(x, f,
                       {{"p_min", &Inverter::p_min},
                        {"p_max", &Inverter::p_max},
                        {"q_min", &Inverter::q_min},
                        {"q_max", &Inverter::q_max}});
    });
  if (coll == "pipes")
    return collect(c.pipes, sel, field, path, [](GasPipe& x, const std::string& f) {
      return field_ptr(x, f,
                       {{"c_p", &GasPipe::c_p},
                        {"pi0_from", &GasPipe::pi0_from},
                        {"pi0_to", &GasPipe::pi0_to},
                        {"f_max", &GasPipe::f_max}});
    });
  if (coll == "batteries")
    return collect(c.batteries, sel, field, path, [](BatteryUnit& x, const std::string& f) {
      return field_ptr(x, f,
                       {{"p_ch_min", &BatteryUnit::p_ch_min},
                        {"p_ch_max", &BatteryUnit::p_ch_max},
                        {"p_dc_min", &BatteryUnit::p_dc_min},
                        {"p_dc_max", &BatteryUnit::p_dc_max},
                        {"eta_ch", &BatteryUnit::eta_ch},
                        {"eta_dc", &BatteryUnit::eta_dc},
                        {"e_min", &BatteryUnit::e_min},
                        {"e_max", &BatteryUnit::e_max},
                        {"e_initial", &BatteryUnit::e_initial}});
    });
  if (coll == "turbines")
    return collect(c.turbines, sel, field, path, [](Microturbine& x, const std::string& f) {
      return field_ptr(x, f,
                       {{"p_min", &Microturbine::p_min},
                        {"p_max", &Microturbine::p_max},
                        {"q_min", &Microturbine::q_min},
                        {"q_max", &Microturbine::q_max}});
    });
  if (coll == "suppliers")
    return collect(c.suppliers, sel, field, path, [](GasSupplier& x, const std::string& f) {
      return field_ptr(x, f, {{"v_min", &GasSupplier::v_min}, {"v_max", &GasSupplier::v_max}});
    });
  if (coll == "ac_lines")
    return collect(c.ac_lines, sel, field, path, [](AcLine& x, const std::string& f) {
      return field_ptr(x, f,
                       {{"g", &AcLine::g}, {"b", &AcLine::b}, {"sl_max", &AcLine::sl_max}});
    });
  if (coll == "dc_lines")
    return collect(c.dc_lines, sel, field, path, [](DcLine& x, const std::string& f) {
      return field_ptr(x, f, {{"r", &DcLine::r}, {"sl_max", &DcLine::sl_max}});
    });
  if (coll == "ac_hubs")
    return collect(c.ac_hubs, sel, field, path, [](AcHub& x, const std::string& f) {
      return field_ptr(x, f, {{"v_min", &AcHub::v_min}, {"v_max", &AcHub::v_max}});
    });
  if (coll == "dc_hubs")
    return collect(c.dc_hubs, sel, field, path, [](DcHub& x, const std::string& f) {
      return field_ptr(x, f, {{"v_min", &DcHub::v_min}, {"v_max", &DcHub::v_max}});
    });
  if (coll == "gas_hubs")
    return collect(c.gas_hubs, sel, field, path, [](GasHub& x, const std::string& f) {
      return field_ptr(x, f, {{"pi_min", &GasHub::pi_min}, {"pi_max", &GasHub::pi_max}});
    });
  throw std::invalid_argument("unknown collection \"" + coll + "\" in path " + path);
}

std::vector<SweepRow> sweep(const MicrogridCase& base_case, const std::string& parameter_path,
                            const std::vector<double>& values, const BnbOptions& opts,
                            MilpBackend* backend) {
  {
    MicrogridCase probe = base_case;  // fail fast on a bad path
    resolve_parameter(probe, parameter_path);
  }
  std::vector<SweepRow> table;
  table.reserve(values.size());
  for (double v : values) {
    SweepRow row;
    row.value = v;
    try {
      MicrogridCase point = base_case;
      for (double* p : resolve_parameter(point, parameter_path)) *p = v;
      const auto report = validate_case(point);
      if (!report.ok()) throw std::runtime_error("invalid case: " + report.to_string());
      BuiltModel model = build_problem(point);
      const MilpSolution sol =
          backend ? backend->solve(model.problem, opts) : solve_milp(model.problem, opts);
      row.status = sol.status;
      if (sol.status == SolveStatus::optimal || sol.status == SolveStatus::feasible) {
        const DispatchSchedule sched = extract_solution(model, sol.x, sol.objective, sol.status);
        row.metrics = compute_metrics(point, sched);
        row.solved = true;
      }
    } catch (const std::exception& e) {
      row.solved = false;
      row.error = e.what();
      row.status = SolveStatus::numerical_failure;
    }
    table.push_back(std::move(row));
  }
  return table;
}

}  // namespace mecgrid
