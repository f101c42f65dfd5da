#include "mecgrid/results_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mecgrid {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

const char* entity_name(EntityKind e) {
  switch (e) {
    case EntityKind::ac_hub: return "ac_hub";
    case EntityKind::dc_hub: return "dc_hub";
    case EntityKind::gas_hub: return "gas_hub";
    case EntityKind::ac_line: return "ac_line";
    case EntityKind::dc_line: return "dc_line";
    case EntityKind::inverter: return "inverter";
    case EntityKind::turbine: return "turbine";
    case EntityKind::renewable: return "renewable";
    case EntityKind::battery: return "battery";
    case EntityKind::supplier: return "supplier";
    case EntityKind::pipe: return "pipe";
  }
  return "?";
}

const char* unit_name(Quantity q) {
  switch (q) {
    case Quantity::V: return "pu";
    case Quantity::Theta: return "rad";
    case Quantity::Qd:
    case Quantity::Qg:
    case Quantity::Qw:
    case Quantity::Qs:
    case Quantity::Qc:
    case Quantity::QL: return "kvar";
    case Quantity::SL: return "kva";
    case Quantity::Ich:
    case Quantity::Idc: return "binary";
    case Quantity::E: return "kwh";
    case Quantity::Vgs:
    case Quantity::Fp:
    case Quantity::Gd: return "skcf_hr";
    case Quantity::Pi: return "pressure";
    default: return "kw";
  }
}

std::string entity_id(const MicrogridCase& c, EntityKind e, int o) {
  switch (e) {
    case EntityKind::ac_hub: return c.ac_hubs[o].id;
    case EntityKind::dc_hub: return c.dc_hubs[o].id;
    case EntityKind::gas_hub: return c.gas_hubs[o].id;
    case EntityKind::ac_line: return c.ac_lines[o].from + "-" + c.ac_lines[o].to;
    case EntityKind::dc_line: return c.dc_lines[o].from + "-" + c.dc_lines[o].to;
    case EntityKind::inverter: return c.inverters[o].id;
    case EntityKind::turbine: return c.turbines[o].id;
    case EntityKind::renewable: return c.renewables[o].id;
    case EntityKind::battery: return c.batteries[o].id;
    case EntityKind::supplier: return c.suppliers[o].id;
    case EntityKind::pipe: return c.pipes[o].id;
  }
  return "?";
}

}  // namespace

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_file_atomic(const std::string& dir, const std::string& name,
                       const std::string& content) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path target = fs::path(dir) / name;
  const fs::path tmp = fs::path(dir) / (".tmp-" + name);
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target, ec);
  if (ec)
    throw std::runtime_error("cannot move " + tmp.string() + " to " + target.string() + ": " +
                             ec.message());
}

void write_results(const MicrogridCase& c, const DispatchSchedule& s, const SummaryMetrics& m,
                   const std::string& out_dir) {
  // schedule.csv: hours are 1-based in every output file
  {
    std::ostringstream os;
    os << "hour,entity,id,quantity,value,unit\n";
    for (int t = 0; t < s.horizon; ++t) {
      for (const VarKey& k : s.index.keys()) {
        if (k.hour != t) continue;
        if (k.quantity == Quantity::FuelSeg || k.quantity == Quantity::CostSeg) continue;
        os << (t + 1) << ',' << entity_name(k.entity) << ','
           << csv_field(entity_id(c, k.entity, k.ordinal)) << ',' << to_string(k.quantity) << ','
           << format_number(s.raw_value(k) * physical_scale(k.quantity, s.base_kva)) << ','
           << unit_name(k.quantity) << '\n';
      }
    }
    write_file_atomic(out_dir, "schedule.csv", os.str());
  }

  {
    std::ostringstream os;
    os << "hour,carrier,id,from,to,flow_p,flow_q,apparent\n";
    for (int t = 0; t < s.horizon; ++t) {
      for (int l = 0; l < (int)c.ac_lines.size(); ++l) {
        const auto& line = c.ac_lines[l];
        os << (t + 1) << ",ac," << csv_field(line.from + "-" + line.to) << ','
           << csv_field(line.from) << ',' << csv_field(line.to) << ','
           << format_number(s.value(EntityKind::ac_line, l, Quantity::PL, t)) << ','
           << format_number(s.value(EntityKind::ac_line, l, Quantity::QL, t)) << ','
           << format_number(s.value(EntityKind::ac_line, l, Quantity::SL, t)) << '\n';
      }
      for (int l = 0; l < (int)c.dc_lines.size(); ++l) {
        const auto& line = c.dc_lines[l];
        os << (t + 1) << ",dc," << csv_field(line.from + "-" + line.to) << ','
           << csv_field(line.from) << ',' << csv_field(line.to) << ','
           << format_number(s.value(EntityKind::dc_line, l, Quantity::PL, t)) << ",,\n";
      }
      for (int p = 0; p < (int)c.pipes.size(); ++p) {
        const auto& pipe = c.pipes[p];
        os << (t + 1) << ",gas," << csv_field(pipe.id) << ',' << csv_field(pipe.from) << ','
           << csv_field(pipe.to) << ','
           << format_number(s.value(EntityKind::pipe, p, Quantity::Fp, t)) << ",,\n";
      }
    }
    write_file_atomic(out_dir, "flows.csv", os.str());
  }

  {
    std::ostringstream os;
    os << "hour,id,e_kwh,p_ch_kw,p_dc_kw,i_ch,i_dc\n";
    for (int t = 0; t < s.horizon; ++t)
      for (int k = 0; k < (int)c.batteries.size(); ++k)
        os << (t + 1) << ',' << csv_field(c.batteries[k].id) << ','
           << format_number(s.value(EntityKind::battery, k, Quantity::E, t)) << ','
           << format_number(s.value(EntityKind::battery, k, Quantity::Pch, t)) << ','
           << format_number(s.value(EntityKind::battery, k, Quantity::Pdc, t)) << ','
           << format_number(s.value(EntityKind::battery, k, Quantity::Ich, t)) << ','
           << format_number(s.value(EntityKind::battery, k, Quantity::Idc, t)) << '\n';
    write_file_atomic(out_dir, "battery.csv", os.str());
  }

  {
    json j;
    j["status"] = to_string(m.status);
    j["objective_cost_usd"] = m.objective_cost;
    j["lost_load_kwh"] = m.lost_load_kwh;
    j["lost_heat_skcf"] = m.lost_heat_skcf;
    j["heat_served_fraction"] = m.heat_served_fraction;
    j["fuel_cost_usd"] = m.fuel_cost;
    j["degradation_cost_usd"] = m.degradation_cost;
    j["total_generation_kwh"] = m.total_generation_kwh;
    j["hourly"] = {{"lost_load_kw", m.hourly_lost_load_kw},
                   {"heat_served_skcf", m.hourly_heat_served_skcf},
                   {"generation_kw", m.hourly_generation_kw},
                   {"discharge_kw", m.hourly_discharge_kw}};
    write_file_atomic(out_dir, "metrics.json", j.dump(2) + "\n");
  }
}

void write_sweep_results(const std::string& parameter_path, const std::vector<SweepRow>& table,
                         const std::string& out_dir) {
  std::ostringstream os;
  os << "param,value,status,objective_cost_usd,lost_load_kwh,lost_heat_skcf,"
        "heat_served_fraction,fuel_cost_usd,degradation_cost_usd,total_generation_kwh,error\n";
  for (const auto& row : table) {
    os << csv_field(parameter_path) << ',' << format_number(row.value) << ','
       << to_string(row.status) << ',';
    if (row.solved) {
      const auto& m = row.metrics;
      os << format_number(m.objective_cost) << ',' << format_number(m.lost_load_kwh) << ','
         << format_number(m.lost_heat_skcf) << ',' << format_number(m.heat_served_fraction)
         << ',' << format_number(m.fuel_cost) << ',' << format_number(m.degradation_cost) << ','
         << format_number(m.total_generation_kwh) << ',';
    } else {
      os << ",,,,,,,";
    }
    // error notes stay on one record even when they quote multi-line reports
    std::string note = row.error;
    while (!note.empty() && (note.back() == '\n' || note.back() == ' ')) note.pop_back();
    for (char& ch : note)
      if (ch == '\n') ch = ';';
    os << csv_field(note) << '\n';
  }
  write_file_atomic(out_dir, "sweep.csv", os.str());
}

}  // namespace mecgrid
