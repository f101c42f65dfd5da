#include "mecgrid/build_milp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mecgrid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string tag(const std::string& what, const std::string& id, int t) {
  return what + "[" + id + "," + std::to_string(t) + "]";
}

std::string tag(const std::string& what, const std::string& id, int seg, int t) {
  return what + "[" + id + "," + std::to_string(seg) + "," + std::to_string(t) + "]";
}

// PWL of a curve over [lo, hi]; a collapsed domain yields a single
// breakpoint carrying the constant value.
PwlCurve make_curve(const CurveSpec& spec, double lo, double hi, int segments) {
  if (hi > lo)
    return pwl_approximate([&](double x) { return spec(x); }, lo, hi, segments);
  PwlCurve c;
  c.breakpoints.push_back({lo, spec(lo)});
  return c;
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible: return "feasible";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::limit: return "limit";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "?";
}

VariableIndex index_variables(const MicrogridCase& c, int horizon) {
  VariableIndex ix;
  const int ref = c.reference_hub_index();
  const int segs = c.costs.pwl_segments;
  for (int t = 0; t < horizon; ++t) {
    for (int j = 0; j < (int)c.ac_hubs.size(); ++j) {
      ix.add({EntityKind::ac_hub, (int16_t)j, Quantity::V, -1, t});
      if (j != ref) ix.add({EntityKind::ac_hub, (int16_t)j, Quantity::Theta, -1, t});
      ix.add({EntityKind::ac_hub, (int16_t)j, Quantity::Pd, -1, t});
      ix.add({EntityKind::ac_hub, (int16_t)j, Quantity::Qd, -1, t});
    }
    for (int g = 0; g < (int)c.turbines.size(); ++g) {
      const auto& mt = c.turbines[g];
      ix.add({EntityKind::turbine, (int16_t)g, Quantity::Pg, -1, t});
      if (mt.network == Network::ac) ix.add({EntityKind::turbine, (int16_t)g, Quantity::Qg, -1, t});
      if (mt.p_max > mt.p_min)
        for (int s = 0; s < segs; ++s)
          ix.add({EntityKind::turbine, (int16_t)g, Quantity::FuelSeg, (int16_t)s, t});
    }
    for (int r = 0; r < (int)c.renewables.size(); ++r) {
      const auto& ru = c.renewables[r];
      const bool wind = ru.kind == RenewableKind::wind;
      ix.add({EntityKind::renewable, (int16_t)r, wind ? Quantity::Pw : Quantity::Ps, -1, t});
      if (ru.network == Network::ac)
        ix.add({EntityKind::renewable, (int16_t)r, wind ? Quantity::Qw : Quantity::Qs, -1, t});
    }
    for (int i = 0; i < (int)c.inverters.size(); ++i) {
      ix.add({EntityKind::inverter, (int16_t)i, Quantity::Pc, -1, t});
      ix.add({EntityKind::inverter, (int16_t)i, Quantity::Qc, -1, t});
    }
    for (int l = 0; l < (int)c.ac_lines.size(); ++l) {
      ix.add({EntityKind::ac_line, (int16_t)l, Quantity::PL, -1, t});
      ix.add({EntityKind::ac_line, (int16_t)l, Quantity::QL, -1, t});
      ix.add({EntityKind::ac_line, (int16_t)l, Quantity::SL, -1, t});
    }
    for (int j = 0; j < (int)c.dc_hubs.size(); ++j) {
      ix.add({EntityKind::dc_hub, (int16_t)j, Quantity::V, -1, t});
      ix.add({EntityKind::dc_hub, (int16_t)j, Quantity::Pd, -1, t});
    }
    for (int l = 0; l < (int)c.dc_lines.size(); ++l)
      ix.add({EntityKind::dc_line, (int16_t)l, Quantity::PL, -1, t});
    for (int k = 0; k < (int)c.batteries.size(); ++k) {
      ix.add({EntityKind::battery, (int16_t)k, Quantity::Pch, -1, t});
      ix.add({EntityKind::battery, (int16_t)k, Quantity::Pdc, -1, t});
      ix.add({EntityKind::battery, (int16_t)k, Quantity::Ich, -1, t});
      ix.add({EntityKind::battery, (int16_t)k, Quantity::Idc, -1, t});
      ix.add({EntityKind::battery, (int16_t)k, Quantity::E, -1, t});
    }
    for (int n = 0; n < (int)c.gas_hubs.size(); ++n) {
      ix.add({EntityKind::gas_hub, (int16_t)n, Quantity::Pi, -1, t});
      ix.add({EntityKind::gas_hub, (int16_t)n, Quantity::Gd, -1, t});
    }
    for (int s = 0; s < (int)c.suppliers.size(); ++s) {
      ix.add({EntityKind::supplier, (int16_t)s, Quantity::Vgs, -1, t});
      if (c.suppliers[s].v_max > c.suppliers[s].v_min)
        for (int q = 0; q < segs; ++q)
          ix.add({EntityKind::supplier, (int16_t)s, Quantity::CostSeg, (int16_t)q, t});
    }
    for (int p = 0; p < (int)c.pipes.size(); ++p)
      ix.add({EntityKind::pipe, (int16_t)p, Quantity::Fp, -1, t});
  }
  return ix;
}

ModelBuilder::ModelBuilder(const MicrogridCase& physical_case) {
  model_.physical = physical_case;
  model_.per_unit = to_per_unit(physical_case);
  model_.ybus = assemble_admittance(model_.per_unit);
  model_.flow_models = linearize_pipes(model_.per_unit);
  const auto& pu = model_.per_unit;
  const int segs = pu.costs.pwl_segments;
  for (const auto& mt : pu.turbines)
    model_.fuel_curves.push_back(make_curve(mt.fuel_curve, mt.p_min, mt.p_max, segs));
  for (const auto& gs : pu.suppliers)
    model_.cost_curves.push_back(make_curve(gs.cost_curve, gs.v_min, gs.v_max, segs));
  model_.index = index_variables(pu, pu.horizon);
  emit_variables();
}

int ModelBuilder::col(EntityKind e, int ordinal, Quantity q, int hour, int segment) const {
  int c = model_.index.column({e, (int16_t)ordinal, q, (int16_t)segment, hour});
  if (c < 0) throw std::logic_error("builder: missing column");
  return c;
}

void ModelBuilder::push(Row& r, int column, double coeff) {
  if (coeff == 0.0) return;
  for (auto& [c, v] : r.coeffs)
    if (c == column) {
      v += coeff;
      return;
    }
  r.coeffs.emplace_back(column, coeff);
}

void ModelBuilder::emit_variables() {
  const auto& c = model_.per_unit;
  auto& p = model_.problem;
  for (const auto& key : model_.index.keys()) {
    const int t = key.hour;
    const int o = key.ordinal;
    std::string name;
    VarKind kind = VarKind::continuous;
    double lb = -kInf, ub = kInf;
    switch (key.quantity) {
      case Quantity::V: {
        if (key.entity == EntityKind::ac_hub) {
          const auto& h = c.ac_hubs[o];
          name = tag("V", h.id, t);
          lb = h.v_min;
          ub = h.v_max;
        } else {
          const auto& h = c.dc_hubs[o];
          name = tag("Vdc", h.id, t);
          lb = h.v_min;
          ub = h.v_max;
        }
        break;
      }
      case Quantity::Theta:
        name = tag("theta", c.ac_hubs[o].id, t);
        break;  // free; reference hub carries no column
      case Quantity::Pd: {
        const bool ac = key.entity == EntityKind::ac_hub;
        const auto& id = ac ? c.ac_hubs[o].id : c.dc_hubs[o].id;
        name = tag(ac ? "P_d" : "P_d.dc", id, t);
        lb = 0.0;
        ub = ac ? c.ac_hubs[o].demand_p[t] : c.dc_hubs[o].demand_p[t];
        break;
      }
      case Quantity::Qd: {
        const auto& h = c.ac_hubs[o];
        name = tag("Q_d", h.id, t);
        // reactive-only demand has no active power to scale against; it is
        // served as a hard requirement
        if (h.demand_p[t] > 0.0) {
          lb = 0.0;
          ub = h.demand_q[t];
        } else {
          lb = ub = h.demand_q[t];
        }
        break;
      }
      case Quantity::Pg:
        name = tag("P_g", c.turbines[o].id, t);
        lb = c.turbines[o].p_min;
        ub = c.turbines[o].p_max;
        break;
      case Quantity::Qg:
        name = tag("Q_g", c.turbines[o].id, t);
        lb = c.turbines[o].q_min;
        ub = c.turbines[o].q_max;
        break;
      case Quantity::Pw:
      case Quantity::Ps:
        name = tag(key.quantity == Quantity::Pw ? "P_w" : "P_s", c.renewables[o].id, t);
        lb = 0.0;
        ub = c.renewables[o].forecast[t];
        break;
      case Quantity::Qw:
      case Quantity::Qs: {
        // |Q| <= dispatched P is enforced by rows; the forecast caps both
        const double f = c.renewables[o].forecast[t];
        name = tag(key.quantity == Quantity::Qw ? "Q_w" : "Q_s", c.renewables[o].id, t);
        lb = -f;
        ub = f;
        break;
      }
      case Quantity::Pc:
        name = tag("P_c", c.inverters[o].id, t);
        lb = c.inverters[o].p_min;
        ub = c.inverters[o].p_max;
        break;
      case Quantity::Qc:
        name = tag("Q_c", c.inverters[o].id, t);
        lb = c.inverters[o].q_min;
        ub = c.inverters[o].q_max;
        break;
      case Quantity::PL:
        if (key.entity == EntityKind::ac_line) {
          const auto& l = c.ac_lines[o];
          name = tag("PL", l.from + "-" + l.to, t);
        } else {
          const auto& l = c.dc_lines[o];
          name = tag("PLdc", l.from + "-" + l.to, t);
          lb = -l.sl_max;
          ub = l.sl_max;
        }
        break;
      case Quantity::QL:
        name = tag("QL", c.ac_lines[o].from + "-" + c.ac_lines[o].to, t);
        break;
      case Quantity::SL:
        name = tag("SL", c.ac_lines[o].from + "-" + c.ac_lines[o].to, t);
        break;
      case Quantity::Pch:
        name = tag("P_ch", c.batteries[o].id, t);
        lb = 0.0;
        ub = c.batteries[o].p_ch_max;
        break;
      case Quantity::Pdc:
        name = tag("P_dc", c.batteries[o].id, t);
        lb = 0.0;
        ub = c.batteries[o].p_dc_max;
        break;
      case Quantity::Ich:
        name = tag("I_ch", c.batteries[o].id, t);
        kind = VarKind::binary;
        lb = 0.0;
        ub = 1.0;
        break;
      case Quantity::Idc:
        name = tag("I_dc", c.batteries[o].id, t);
        kind = VarKind::binary;
        lb = 0.0;
        ub = 1.0;
        break;
      case Quantity::E:
        name = tag("E", c.batteries[o].id, t);
        lb = c.batteries[o].e_min;
        ub = c.batteries[o].e_max;
        break;
      case Quantity::Vgs:
        name = tag("v_gs", c.suppliers[o].id, t);
        lb = c.suppliers[o].v_min;
        ub = c.suppliers[o].v_max;
        break;
      case Quantity::Pi:
        name = tag("pi", c.gas_hubs[o].id, t);
        lb = c.gas_hubs[o].pi_min;
        ub = c.gas_hubs[o].pi_max;
        break;
      case Quantity::Fp:
        name = tag("f_p", c.pipes[o].id, t);
        break;
      case Quantity::Gd:
        name = tag("g_d", c.gas_hubs[o].id, t);
        lb = 0.0;
        ub = c.gas_hubs[o].heat_demand[t];
        break;
      case Quantity::FuelSeg: {
        const auto& curve = model_.fuel_curves[o];
        name = tag("fuel_seg", c.turbines[o].id, key.segment, t);
        lb = 0.0;
        ub = curve.breakpoints[key.segment + 1].x - curve.breakpoints[key.segment].x;
        break;
      }
      case Quantity::CostSeg: {
        const auto& curve = model_.cost_curves[o];
        name = tag("cost_seg", c.suppliers[o].id, key.segment, t);
        lb = 0.0;
        ub = curve.breakpoints[key.segment + 1].x - curve.breakpoints[key.segment].x;
        break;
      }
    }
    p.add_variable(std::move(name), kind, lb, ub);
  }
}

void ModelBuilder::add_ac_constraints() {
  if (ac_done_) return;
  ac_done_ = true;
  const auto& c = model_.per_unit;
  if (c.ac_hubs.empty()) return;
  const int ref = c.reference_hub_index();
  if (ref < 0) throw std::runtime_error("ac network: missing reference hub");
  auto& p = model_.problem;
  const auto& G = model_.ybus.G;
  const auto& B = model_.ybus.B;
  const int nh = (int)c.ac_hubs.size();

  // device membership per hub
  std::vector<std::vector<int>> turb(nh), ren(nh), inv(nh);
  for (int g = 0; g < (int)c.turbines.size(); ++g)
    if (c.turbines[g].network == Network::ac) turb[c.ac_hub_index(c.turbines[g].hub)].push_back(g);
  for (int r = 0; r < (int)c.renewables.size(); ++r)
    if (c.renewables[r].network == Network::ac)
      ren[c.ac_hub_index(c.renewables[r].hub)].push_back(r);
  for (int i = 0; i < (int)c.inverters.size(); ++i)
    inv[c.ac_hub_index(c.inverters[i].ac_hub)].push_back(i);

  auto theta = [&](int j, int t) -> int {
    return j == ref ? -1 : col(EntityKind::ac_hub, j, Quantity::Theta, t);
  };

  for (int t = 0; t < c.horizon; ++t) {
    for (int j = 0; j < nh; ++j) {
      const auto& hub = c.ac_hubs[j];
      // active balance: gen + inverter injection - served load - P_inj = const.
      // P_inj is the first-order expansion of the nodal injection around the
      // flat start; with shunt-free Y its constant part cancels to zero.
      Row& rp = p.add_row(tag("acP", hub.id, t), RowSense::eq, 0.0);
      double rhs_p = 0.0;
      for (int g : turb[j]) push(rp, col(EntityKind::turbine, g, Quantity::Pg, t), 1.0);
      for (int r : ren[j]) {
        const bool wind = c.renewables[r].kind == RenewableKind::wind;
        push(rp, col(EntityKind::renewable, r, wind ? Quantity::Pw : Quantity::Ps, t), 1.0);
      }
      for (int i : inv[j]) push(rp, col(EntityKind::inverter, i, Quantity::Pc, t), 1.0);
      push(rp, col(EntityKind::ac_hub, j, Quantity::Pd, t), -1.0);
      // -P_inj terms
      push(rp, col(EntityKind::ac_hub, j, Quantity::V, t), -2.0 * G(j, j));
      rhs_p += -G(j, j);
      for (int o = 0; o < nh; ++o) {
        if (o == j) continue;
        if (G(j, o) != 0.0) {
          push(rp, col(EntityKind::ac_hub, j, Quantity::V, t), -G(j, o));
          push(rp, col(EntityKind::ac_hub, o, Quantity::V, t), -G(j, o));
          rhs_p += -G(j, o);
        }
        if (B(j, o) != 0.0) {
          if (theta(j, t) >= 0) push(rp, theta(j, t), -B(j, o));
          if (theta(o, t) >= 0) push(rp, theta(o, t), B(j, o));
        }
      }
      rp.rhs = rhs_p;

      // reactive balance; the diagonal expansion mirrors the active one so a
      // flat start also yields zero injection
      Row& rq = p.add_row(tag("acQ", hub.id, t), RowSense::eq, 0.0);
      double rhs_q = 0.0;
      for (int g : turb[j]) push(rq, col(EntityKind::turbine, g, Quantity::Qg, t), 1.0);
      for (int r : ren[j]) {
        const bool wind = c.renewables[r].kind == RenewableKind::wind;
        push(rq, col(EntityKind::renewable, r, wind ? Quantity::Qw : Quantity::Qs, t), 1.0);
      }
      for (int i : inv[j]) push(rq, col(EntityKind::inverter, i, Quantity::Qc, t), 1.0);
      push(rq, col(EntityKind::ac_hub, j, Quantity::Qd, t), -1.0);
      // -Q_inj terms: Q_inj = (1 - 2V_j)B_jj + sum(G_jo (th_j - th_o) - B_jo (V_j + V_o - 1))
      push(rq, col(EntityKind::ac_hub, j, Quantity::V, t), 2.0 * B(j, j));
      rhs_q += B(j, j);
      for (int o = 0; o < nh; ++o) {
        if (o == j) continue;
        if (B(j, o) != 0.0) {
          push(rq, col(EntityKind::ac_hub, j, Quantity::V, t), B(j, o));
          push(rq, col(EntityKind::ac_hub, o, Quantity::V, t), B(j, o));
          rhs_q += B(j, o);
        }
        if (G(j, o) != 0.0) {
          if (theta(j, t) >= 0) push(rq, theta(j, t), -G(j, o));
          if (theta(o, t) >= 0) push(rq, theta(o, t), G(j, o));
        }
      }
      rq.rhs = rhs_q;

      // proportional load shedding keeps the power factor constant
      if (hub.demand_p[t] > 0.0 && hub.demand_q[t] > 0.0) {
        Row& rl = p.add_row(tag("qdLink", hub.id, t), RowSense::eq, 0.0);
        push(rl, col(EntityKind::ac_hub, j, Quantity::Qd, t), 1.0);
        push(rl, col(EntityKind::ac_hub, j, Quantity::Pd, t), -hub.demand_q[t] / hub.demand_p[t]);
      }
    }

    for (int l = 0; l < (int)c.ac_lines.size(); ++l) {
      const auto& line = c.ac_lines[l];
      const int j = c.ac_hub_index(line.from);
      const int o = c.ac_hub_index(line.to);
      // off-diagonal entries of this line alone
      const double Gjo = -line.g, Bjo = -line.b;
      const std::string lid = line.from + "-" + line.to;
      const int vj = col(EntityKind::ac_hub, j, Quantity::V, t);
      const int vo = col(EntityKind::ac_hub, o, Quantity::V, t);
      const int pl = col(EntityKind::ac_line, l, Quantity::PL, t);
      const int ql = col(EntityKind::ac_line, l, Quantity::QL, t);
      const int sl = col(EntityKind::ac_line, l, Quantity::SL, t);

      Row& rpl = p.add_row(tag("plDef", lid, t), RowSense::eq, 0.0);
      push(rpl, pl, 1.0);
      push(rpl, vj, Gjo);
      push(rpl, vo, -Gjo);
      if (theta(j, t) >= 0) push(rpl, theta(j, t), -Bjo);
      if (theta(o, t) >= 0) push(rpl, theta(o, t), Bjo);

      Row& rql = p.add_row(tag("qlDef", lid, t), RowSense::eq, 0.0);
      push(rql, ql, 1.0);
      push(rql, vj, -Bjo);
      push(rql, vo, Bjo);
      if (theta(j, t) >= 0) push(rql, theta(j, t), -Gjo);
      if (theta(o, t) >= 0) push(rql, theta(o, t), Gjo);

      Row& rsl = p.add_row(tag("slDef", lid, t), RowSense::eq, 0.0);
      push(rsl, sl, 1.0);
      push(rsl, pl, -1.0);
      push(rsl, ql, -c.costs.xi);

      Row& rub = p.add_row(tag("slUb", lid, t), RowSense::le, line.sl_max);
      push(rub, sl, 1.0);
      Row& rlb = p.add_row(tag("slLb", lid, t), RowSense::ge, -line.sl_max);
      push(rlb, sl, 1.0);
    }

    // renewable reactive support is capped by the dispatched active power
    for (int r = 0; r < (int)c.renewables.size(); ++r) {
      if (c.renewables[r].network != Network::ac) continue;
      const bool wind = c.renewables[r].kind == RenewableKind::wind;
      const int pq = col(EntityKind::renewable, r, wind ? Quantity::Pw : Quantity::Ps, t);
      const int qq = col(EntityKind::renewable, r, wind ? Quantity::Qw : Quantity::Qs, t);
      Row& up = p.add_row(tag("renQub", c.renewables[r].id, t), RowSense::le, 0.0);
      push(up, qq, 1.0);
      push(up, pq, -1.0);
      Row& lo = p.add_row(tag("renQlb", c.renewables[r].id, t), RowSense::ge, 0.0);
      push(lo, qq, 1.0);
      push(lo, pq, 1.0);
    }
  }
}

void ModelBuilder::add_dc_constraints() {
  if (dc_done_) return;
  dc_done_ = true;
  const auto& c = model_.per_unit;
  auto& p = model_.problem;
  const int nh = (int)c.dc_hubs.size();
  if (nh == 0) return;

  std::vector<std::vector<int>> turb(nh), ren(nh), inv(nh), bat(nh);
  std::vector<std::vector<int>> lines_from(nh), lines_to(nh);
  for (int g = 0; g < (int)c.turbines.size(); ++g)
    if (c.turbines[g].network == Network::dc) turb[c.dc_hub_index(c.turbines[g].hub)].push_back(g);
  for (int r = 0; r < (int)c.renewables.size(); ++r)
    if (c.renewables[r].network == Network::dc)
      ren[c.dc_hub_index(c.renewables[r].hub)].push_back(r);
  for (int i = 0; i < (int)c.inverters.size(); ++i)
    inv[c.dc_hub_index(c.inverters[i].dc_hub)].push_back(i);
  for (int k = 0; k < (int)c.batteries.size(); ++k)
    bat[c.dc_hub_index(c.batteries[k].dc_hub)].push_back(k);
  for (int l = 0; l < (int)c.dc_lines.size(); ++l) {
    lines_from[c.dc_hub_index(c.dc_lines[l].from)].push_back(l);
    lines_to[c.dc_hub_index(c.dc_lines[l].to)].push_back(l);
  }

  for (int t = 0; t < c.horizon; ++t) {
    for (int k = 0; k < (int)c.batteries.size(); ++k) {
      const auto& bt = c.batteries[k];
      const int pch = col(EntityKind::battery, k, Quantity::Pch, t);
      const int pdc = col(EntityKind::battery, k, Quantity::Pdc, t);
      const int ich = col(EntityKind::battery, k, Quantity::Ich, t);
      const int idc = col(EntityKind::battery, k, Quantity::Idc, t);
      const int e = col(EntityKind::battery, k, Quantity::E, t);

      // indicator bounds are products of binaries with constant limits, so
      // they stay linear without any big-M constant
      Row& chub = p.add_row(tag("batChUb", bt.id, t), RowSense::le, 0.0);
      push(chub, pch, 1.0);
      push(chub, ich, -bt.p_ch_max);
      Row& chlb = p.add_row(tag("batChLb", bt.id, t), RowSense::ge, 0.0);
      push(chlb, pch, 1.0);
      push(chlb, ich, -bt.p_ch_min);
      Row& dcub = p.add_row(tag("batDcUb", bt.id, t), RowSense::le, 0.0);
      push(dcub, pdc, 1.0);
      push(dcub, idc, -bt.p_dc_max);
      Row& dclb = p.add_row(tag("batDcLb", bt.id, t), RowSense::ge, 0.0);
      push(dclb, pdc, 1.0);
      push(dclb, idc, -bt.p_dc_min);

      Row& excl = p.add_row(tag("batExcl", bt.id, t), RowSense::le, 1.0);
      push(excl, ich, 1.0);
      push(excl, idc, 1.0);

      // E_t = E_{t-1} + eta_ch P_ch - P_dc / eta_dc
      Row& rec = p.add_row(tag("batE", bt.id, t), RowSense::eq, 0.0);
      push(rec, e, 1.0);
      push(rec, pch, -bt.eta_ch);
      push(rec, pdc, 1.0 / bt.eta_dc);
      if (t == 0)
        rec.rhs = bt.e_initial;
      else
        push(rec, col(EntityKind::battery, k, Quantity::E, t - 1), -1.0);

      if (t == c.horizon - 1 && bt.terminal_rule == TerminalRule::at_least_initial) {
        Row& term = p.add_row(tag("batTerm", bt.id, t), RowSense::ge, bt.e_initial);
        push(term, e, 1.0);
      }
    }

    for (int l = 0; l < (int)c.dc_lines.size(); ++l) {
      const auto& line = c.dc_lines[l];
      const int j = c.dc_hub_index(line.from);
      const int o = c.dc_hub_index(line.to);
      Row& def = p.add_row(tag("dcPlDef", line.from + "-" + line.to, t), RowSense::eq, 0.0);
      push(def, col(EntityKind::dc_line, l, Quantity::PL, t), 1.0);
      push(def, col(EntityKind::dc_hub, j, Quantity::V, t), -1.0 / line.r);
      push(def, col(EntityKind::dc_hub, o, Quantity::V, t), 1.0 / line.r);
    }

    for (int j = 0; j < nh; ++j) {
      const auto& hub = c.dc_hubs[j];
      Row& bal = p.add_row(tag("dcP", hub.id, t), RowSense::eq, 0.0);
      for (int k : bat[j]) {
        push(bal, col(EntityKind::battery, k, Quantity::Pdc, t), 1.0);
        push(bal, col(EntityKind::battery, k, Quantity::Pch, t), -1.0);
      }
      for (int g : turb[j]) push(bal, col(EntityKind::turbine, g, Quantity::Pg, t), 1.0);
      for (int r : ren[j]) {
        const bool wind = c.renewables[r].kind == RenewableKind::wind;
        push(bal, col(EntityKind::renewable, r, wind ? Quantity::Pw : Quantity::Ps, t), 1.0);
      }
      // the inverter injection carries the opposite sign on the DC side
      for (int i : inv[j]) push(bal, col(EntityKind::inverter, i, Quantity::Pc, t), -1.0);
      push(bal, col(EntityKind::dc_hub, j, Quantity::Pd, t), -1.0);
      for (int l : lines_from[j]) push(bal, col(EntityKind::dc_line, l, Quantity::PL, t), -1.0);
      for (int l : lines_to[j]) push(bal, col(EntityKind::dc_line, l, Quantity::PL, t), 1.0);
    }
  }
}

void ModelBuilder::add_gas_constraints() {
  if (gas_done_) return;
  gas_done_ = true;
  const auto& c = model_.per_unit;
  auto& p = model_.problem;
  const int nh = (int)c.gas_hubs.size();
  if (nh == 0) return;
  if (model_.flow_models.size() != c.pipes.size())
    throw std::runtime_error("gas: pipe without a linear flow model");

  std::vector<std::vector<int>> sup(nh), turb(nh), pipes_from(nh), pipes_to(nh);
  for (int s = 0; s < (int)c.suppliers.size(); ++s)
    sup[c.gas_hub_index(c.suppliers[s].gas_hub)].push_back(s);
  for (int g = 0; g < (int)c.turbines.size(); ++g)
    turb[c.gas_hub_index(c.turbines[g].gas_hub)].push_back(g);
  for (int q = 0; q < (int)c.pipes.size(); ++q) {
    pipes_from[c.gas_hub_index(c.pipes[q].from)].push_back(q);
    pipes_to[c.gas_hub_index(c.pipes[q].to)].push_back(q);
  }

  for (int t = 0; t < c.horizon; ++t) {
    // fuel expansion: P_g = x0 + sum(seg), fuel = y0 + sum(slope * seg)
    for (int g = 0; g < (int)c.turbines.size(); ++g) {
      const auto& curve = model_.fuel_curves[g];
      if (curve.segments() < 1) continue;  // fixed-output unit, constant fuel
      Row& link = p.add_row(tag("fuelLink", c.turbines[g].id, t), RowSense::eq, curve.x_lo());
      push(link, col(EntityKind::turbine, g, Quantity::Pg, t), 1.0);
      for (int s = 0; s < curve.segments(); ++s)
        push(link, col(EntityKind::turbine, g, Quantity::FuelSeg, t, s), -1.0);
    }
    for (int s = 0; s < (int)c.suppliers.size(); ++s) {
      const auto& curve = model_.cost_curves[s];
      if (curve.segments() < 1) continue;
      Row& link = p.add_row(tag("costLink", c.suppliers[s].id, t), RowSense::eq, curve.x_lo());
      push(link, col(EntityKind::supplier, s, Quantity::Vgs, t), 1.0);
      for (int q = 0; q < curve.segments(); ++q)
        push(link, col(EntityKind::supplier, s, Quantity::CostSeg, t, q), -1.0);
    }

    for (int q = 0; q < (int)c.pipes.size(); ++q) {
      const auto& pipe = c.pipes[q];
      const auto& fm = model_.flow_models[q];
      const int fp = col(EntityKind::pipe, q, Quantity::Fp, t);
      Row& def = p.add_row(tag("fpDef", pipe.id, t), RowSense::eq, 0.0);
      push(def, fp, 1.0);
      push(def, col(EntityKind::gas_hub, c.gas_hub_index(pipe.from), Quantity::Pi, t), -fm.a_n);
      push(def, col(EntityKind::gas_hub, c.gas_hub_index(pipe.to), Quantity::Pi, t), fm.a_m);
      Row& ub = p.add_row(tag("fpUb", pipe.id, t), RowSense::le, pipe.f_max);
      push(ub, fp, 1.0);
      Row& lb = p.add_row(tag("fpLb", pipe.id, t), RowSense::ge, -pipe.f_max);
      push(lb, fp, 1.0);
    }

    for (int n = 0; n < nh; ++n) {
      const auto& hub = c.gas_hubs[n];
      Row& bal = p.add_row(tag("gasBal", hub.id, t), RowSense::eq, 0.0);
      double rhs = 0.0;
      for (int s : sup[n]) push(bal, col(EntityKind::supplier, s, Quantity::Vgs, t), 1.0);
      for (int q : pipes_from[n]) push(bal, col(EntityKind::pipe, q, Quantity::Fp, t), -1.0);
      for (int q : pipes_to[n]) push(bal, col(EntityKind::pipe, q, Quantity::Fp, t), 1.0);
      for (int g : turb[n]) {
        const auto& curve = model_.fuel_curves[g];
        rhs += curve.breakpoints.front().y;  // constant part of the fuel term
        for (int s = 0; s < curve.segments(); ++s)
          push(bal, col(EntityKind::turbine, g, Quantity::FuelSeg, t, s), -curve.slope(s));
      }
      push(bal, col(EntityKind::gas_hub, n, Quantity::Gd, t), -1.0);
      bal.rhs = rhs;
    }
  }
}

void ModelBuilder::add_objective() {
  if (obj_done_) return;
  obj_done_ = true;
  const auto& pu = model_.per_unit;
  const auto& phys = model_.physical;
  auto& p = model_.problem;
  const double base = phys.base.power_kva;
  const auto& k = phys.costs;

  for (int t = 0; t < pu.horizon; ++t) {
    for (int s = 0; s < (int)pu.suppliers.size(); ++s) {
      const auto& curve = model_.cost_curves[s];
      p.objective_offset += curve.breakpoints.front().y;
      for (int q = 0; q < curve.segments(); ++q)
        p.add_objective(col(EntityKind::supplier, s, Quantity::CostSeg, t, q), curve.slope(q));
    }
    for (int j = 0; j < (int)phys.ac_hubs.size(); ++j) {
      p.objective_offset += k.voll_e * phys.ac_hubs[j].demand_p[t];
      p.add_objective(col(EntityKind::ac_hub, j, Quantity::Pd, t), -k.voll_e * base);
    }
    for (int j = 0; j < (int)phys.dc_hubs.size(); ++j) {
      p.objective_offset += k.voll_e * phys.dc_hubs[j].demand_p[t];
      p.add_objective(col(EntityKind::dc_hub, j, Quantity::Pd, t), -k.voll_e * base);
    }
    for (int n = 0; n < (int)phys.gas_hubs.size(); ++n) {
      p.objective_offset += k.voll_g * phys.gas_hubs[n].heat_demand[t];
      p.add_objective(col(EntityKind::gas_hub, n, Quantity::Gd, t), -k.voll_g);
    }
    for (int b = 0; b < (int)phys.batteries.size(); ++b)
      p.add_objective(col(EntityKind::battery, b, Quantity::Pdc, t), k.beta * base);
  }
}

BuiltModel ModelBuilder::build() {
  add_ac_constraints();
  add_dc_constraints();
  add_gas_constraints();
  add_objective();
  return std::move(model_);
}

double physical_scale(Quantity q, double base_kva) {
  switch (q) {
    case Quantity::V:
    case Quantity::Theta:
    case Quantity::Ich:
    case Quantity::Idc:
    case Quantity::Vgs:
    case Quantity::Pi:
    case Quantity::Fp:
    case Quantity::Gd:
    case Quantity::CostSeg:
      return 1.0;
    default:
      return base_kva;
  }
}

bool DispatchSchedule::has(EntityKind e, int ordinal, Quantity q, int hour, int segment) const {
  return index.contains({e, (int16_t)ordinal, q, (int16_t)segment, hour});
}

double DispatchSchedule::value(EntityKind e, int ordinal, Quantity q, int hour,
                               int segment) const {
  int c = index.column({e, (int16_t)ordinal, q, (int16_t)segment, hour});
  if (c < 0) throw std::out_of_range("schedule: unknown key");
  return raw[c] * physical_scale(q, base_kva);
}

double DispatchSchedule::raw_value(const VarKey& k) const {
  int c = index.column(k);
  if (c < 0) throw std::out_of_range("schedule: unknown key");
  return raw[c];
}

DispatchSchedule extract_solution(const BuiltModel& model, const std::vector<double>& raw_values,
                                  double claimed_objective, SolveStatus status) {
  const auto& p = model.problem;
  if ((int)raw_values.size() != p.num_vars())
    throw std::runtime_error("extract: value vector length " +
                             std::to_string(raw_values.size()) + " != variable count " +
                             std::to_string(p.num_vars()));
  if (status != SolveStatus::optimal && status != SolveStatus::feasible)
    throw std::runtime_error("extract: no usable solution (status " +
                             std::string(to_string(status)) + ")");
  DispatchSchedule s;
  s.status = status;
  s.horizon = model.physical.horizon;
  s.base_kva = model.physical.base.power_kva;
  s.index = model.index;
  s.raw = raw_values;
  for (int j = 0; j < p.num_vars(); ++j) {
    if (p.variables[j].kind != VarKind::binary) continue;
    double r = std::round(s.raw[j]);
    if (std::abs(s.raw[j] - r) > 1e-6)
      throw std::runtime_error("extract: binary " + p.variables[j].name + " = " +
                               std::to_string(s.raw[j]) + " is not integral");
    s.raw[j] = r;
  }
  const double recomputed = p.objective_value(s.raw);
  if (std::abs(recomputed - claimed_objective) > 1e-6 * std::max(1.0, std::abs(claimed_objective)))
    throw std::runtime_error("extract: objective mismatch (recomputed " +
                             std::to_string(recomputed) + ", solver " +
                             std::to_string(claimed_objective) + ")");
  s.objective = recomputed;
  return s;
}

}  // namespace mecgrid
