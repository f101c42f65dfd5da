#include "mecgrid/caseio.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <sstream>

namespace mecgrid {

namespace {

using json = nlohmann::ordered_json;

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) {
        known = true;
        break;
      }
    if (!known) throw CaseIoError(where + ": unknown field \"" + key + "\"");
  }
}

double get_num(const json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number())
    throw CaseIoError(where + ": missing or non-numeric field \"" + key + "\"");
  return it->get<double>();
}

double get_num_or(const json& obj, const char* key, double fallback) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : it->get<double>();
}

std::string get_str(const json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string())
    throw CaseIoError(where + ": missing or non-string field \"" + key + "\"");
  return it->get<std::string>();
}

std::vector<double> get_profile(const json& obj, const std::string& where, const char* key,
                                int horizon) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_array())
    throw CaseIoError(where + ": missing or non-array profile \"" + key + "\"");
  std::vector<double> out;
  out.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_number()) throw CaseIoError(where + "." + key + ": non-numeric entry");
    out.push_back(v.get<double>());
  }
  if ((int)out.size() != horizon)
    throw CaseIoError(where + "." + key + ": has " + std::to_string(out.size()) +
                      " entries, horizon is " + std::to_string(horizon));
  return out;
}

CurveSpec parse_curve(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw CaseIoError(where + ": curve must be an object");
  const std::string kind = get_str(obj, where, "kind");
  CurveSpec spec;
  if (kind == "quadratic") {
    check_keys(obj, where, {"kind", "c0", "c1", "c2"});
    spec.kind = CurveSpec::Kind::quadratic;
    spec.c0 = get_num_or(obj, "c0", 0.0);
    spec.c1 = get_num_or(obj, "c1", 0.0);
    spec.c2 = get_num_or(obj, "c2", 0.0);
  } else if (kind == "points") {
    check_keys(obj, where, {"kind", "points"});
    spec.kind = CurveSpec::Kind::points;
    auto it = obj.find("points");
    if (it == obj.end() || !it->is_array() || it->size() < 2)
      throw CaseIoError(where + ": \"points\" must be an array of at least two [x, y] pairs");
    for (const auto& p : *it) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        throw CaseIoError(where + ": each point must be a numeric [x, y] pair");
      spec.samples.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
  } else {
    throw CaseIoError(where + ": curve kind must be \"quadratic\" or \"points\", got \"" + kind +
                      "\"");
  }
  return spec;
}

json dump_curve(const CurveSpec& spec) {
  json j;
  if (spec.kind == CurveSpec::Kind::quadratic) {
    j["kind"] = "quadratic";
    j["c0"] = spec.c0;
    j["c1"] = spec.c1;
    j["c2"] = spec.c2;
  } else {
    j["kind"] = "points";
    json pts = json::array();
    for (const auto& [x, y] : spec.samples) pts.push_back(json::array({x, y}));
    j["points"] = std::move(pts);
  }
  return j;
}

Network parse_network(const std::string& s, const std::string& where) {
  if (s == "ac") return Network::ac;
  if (s == "dc") return Network::dc;
  throw CaseIoError(where + ": network must be \"ac\" or \"dc\", got \"" + s + "\"");
}

const json& element(const json& arr, size_t i, const std::string& where) {
  const json& e = arr[i];
  if (!e.is_object()) throw CaseIoError(where + ": expected an object");
  return e;
}

json expect_array(const json& root, const char* key) {
  auto it = root.find(key);
  if (it == root.end()) return json::array();
  if (!it->is_array()) throw CaseIoError(std::string(key) + " must be an array");
  return *it;
}

}  // namespace

static MicrogridCase parse_case_impl(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw CaseIoError(origin + ": syntax error at byte " + std::to_string(e.byte) + ": " +
                      e.what());
  }
  if (!root.is_object()) throw CaseIoError(origin + ": top level must be an object");
  check_keys(root, origin,
             {"schema", "name", "description", "horizon_hours", "base", "costs", "ac_hubs",
              "ac_lines", "dc_hubs", "dc_lines", "inverters", "turbines", "renewables",
              "batteries", "pipes", "suppliers", "gas_hubs"});
  const int schema = (int)get_num(root, origin, "schema");
  if (schema != 1)
    throw CaseIoError(origin + ": unsupported schema version " + std::to_string(schema) +
                      " (expected 1)");

  MicrogridCase c;
  c.name = root.contains("name") ? root["name"].get<std::string>() : "";
  c.description = root.contains("description") ? root["description"].get<std::string>() : "";
  c.horizon = (int)get_num(root, origin, "horizon_hours");
  if (c.horizon < 1) throw CaseIoError(origin + ": horizon_hours must be at least 1");

  if (root.contains("base")) {
    const json& b = root["base"];
    check_keys(b, "base", {"power_kva", "pressure"});
    c.base.power_kva = get_num(b, "base", "power_kva");
    c.base.pressure = get_num_or(b, "pressure", 1.0);
  }
  if (root.contains("costs")) {
    const json& k = root["costs"];
    check_keys(k, "costs",
               {"voll_e_usd_per_kwh", "voll_g_usd_per_skcf", "beta_usd_per_kwh", "xi",
                "pwl_segments"});
    c.costs.voll_e = get_num(k, "costs", "voll_e_usd_per_kwh");
    c.costs.voll_g = get_num(k, "costs", "voll_g_usd_per_skcf");
    c.costs.beta = get_num(k, "costs", "beta_usd_per_kwh");
    c.costs.xi = get_num_or(k, "xi", 0.5);
    c.costs.pwl_segments = (int)get_num_or(k, "pwl_segments", 4);
  }

  json arr = expect_array(root, "ac_hubs");
  for (size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "ac_hubs[" + std::to_string(i) + "]";
    const json& e = element(arr, i, where);
    check_keys(e, where,
               {"id", "v_min_pu", "v_max_pu", "demand_p_kw", "demand_q_kvar", "is_reference"});
    AcHub h;
    h.id = get_str(e, where, "id");
    h.v_min = get_num(e, where, "v_min_pu");
    h.v_max = get_num(e, where, "v_max_pu");
    h.demand_p = get_profile(e, where, "demand_p_kw", c.horizon);
    h.demand_q = get_profile(e, where, "demand_q_kvar", c.horizon);
    h.is_reference = e.contains("is_reference") && e["is_reference"].get<bool>();
    c.ac_hubs.push_back(std::move(h));
  }

  arr = expect_array(root, "ac_lines");
  for (size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "ac_lines[" + std::to_string(i) + "]";
    const json& e = element(arr, i, where);
    check_keys(e, where, {"from", "to", "g_pu", "b_pu", "sl_max_pu"});
    AcLine l;
    l.from = get_str(e, where, "from");
    l.to = get_str(e, where, "to");
    l.g = get_num(e, where, "g_pu");
    l.b = get_num(e, where, "b_pu");
    l.sl_max = get_num(e, where, "sl_max_pu");
    c.ac_lines.push_back(std::move(l));
  }

  arr = expect_array(root, "dc_hubs");
  for (size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "dc_hubs[" + std::to_string(i) + "]";
    const json& e = element(arr, i, where);
    check_keys(e, where, {"id", "v_min_pu", "v_max_pu", "demand_p_kw"});
    DcHub h;
    h.id = get_str(e, where, "id");
    h.v_min = get_num(e, where, "v_min_pu");
    h.v_max = get_num(e, where, "v_max_pu");
    h.demand_p = get_profile(e, where, "demand_p_kw", c.horizon);
    c.dc_hubs.push_back(std::move(h));
  }

  arr = expect_array(root, "dc_lines");
  for (size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "dc_lines[" + std::to_string(i) + "]";
    const json& e = element(arr, i, where);
    check_keys(e, where, {"from", "to", "r_pu", "sl_max_pu"});
    DcLine l;
    l.from = get_str(e, where, "from");
    l.to = get_str(e, where, "to");
    l.r = get_num(e, where, "r_pu");
    l.sl_max = get_num(e, where, "sl_max_pu");
    c.dc_lines.push_back(std::move(l));
  }

  arr = expect_array(root, "inverters");
  for (size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "inverters[" + std::to_string(i) + "]";
    const json& e = element(arr, i, where);
    check_keys(e, where,
               {"id", "ac_hub", "dc_hub", "p_min_kw", "p_max_kw", "q_min_kvar", "q_max_kvar"});
    Inverter v;
    v.id = get_str(e, where, "id");
    v.ac_hub = get_str(e, where, "ac_hub");
    v.dc_hub = get_str(e, where, "dc_hub");
    v.p_min = get_num(e, where, "p_min_kw");
    v.p_max = get_num(e, where, "p_max_kw");
    v.q_min = get_num(e, where, "q_min_kvar");
    v.q_max = get_num(e, where, "q_max_kvar");
    c.inverters.push_back(std::move(v));
  }

  arr = expect_array(root, "turbines");
  for (size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "turbines[" + std::to_string(i) + "]";
    const json& e = element(arr, i, where);
    check_keys(e, where,
               {"id", "network", "hub", "p_min_kw", "p_max_kw", "q_min_kvar", "q_max_kvar",
                "fuel_curve", "gas_hub"});
    Microturbine g;
    g.id = get_str(e, where, "id");
    g.network = parse_network(get_str(e, where, "network"), where);
    g.hub = get_str(e, where, "hub");
    g.p_min = get_num(e, where, "p_min_kw");
    g.p_max = get_num(e, where, "p_max_kw");
    g.q_min = get_num_or(e, "q_min_kvar", 0.0);
    g.q_max = get_num_or(e, "q_max_kvar", 0.0);
    if (!e.contains("fuel_curve")) throw CaseIoError(where + ": missing fuel_curve");
    g.fuel_curve = parse_curve(e["fuel_curve"], where + ".fuel_curve");
    g.gas_hub = get_str(e, where, "gas_hub");
    c.turbines.push_back(std::move(g));
  }

  arr = expect_array(root, "renewables");
  for (size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "renewables[" + std::to_string(i) + "]";
    const json& e = element(arr, i, where);
    check_keys(e, where, {"id", "kind", "network", "hub", "forecast_kw"});
    RenewableUnit r;
    r.id = get_str(e, where, "id");
    const std::string kind = get_str(e, where, "kind");
    if (kind == "wind")
      r.kind = RenewableKind::wind;
    else if (kind == "solar")
      r.kind = RenewableKind::solar;
    else
      throw CaseIoError(where + ": kind must be \"wind\" or \"solar\", got \"" + kind + "\"");
    r.network = parse_network(get_str(e, where, "network"), where);
    r.hub = get_str(e, where, "hub");
    r.forecast = get_profile(e, where, "forecast_kw", c.horizon);
    c.renewables.push_back(std::move(r));
  }

  arr = expect_array(root, "batteries");
  for (size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "batteries[" + std::to_string(i) + "]";
    const json& e = element(arr, i, where);
    check_keys(e, where,
               {"id", "dc_hub", "p_ch_min_kw", "p_ch_max_kw", "p_dc_min_kw", "p_dc_max_kw",
                "eta_ch", "eta_dc", "e_min_kwh", "e_max_kwh", "e_initial_kwh", "terminal_rule"});
    BatteryUnit b;
    b.id = get_str(e, where, "id");
    b.dc_hub = get_str(e, where, "dc_hub");
    b.p_ch_min = get_num(e, where, "p_ch_min_kw");
    b.p_ch_max = get_num(e, where, "p_ch_max_kw");
    b.p_dc_min = get_num(e, where, "p_dc_min_kw");
    b.p_dc_max = get_num(e, where, "p_dc_max_kw");
    b.eta_ch = get_num(e, where, "eta_ch");
    b.eta_dc = get_num(e, where, "eta_dc");
    b.e_min = get_num(e, where, "e_min_kwh");
    b.e_max = get_num(e, where, "e_max_kwh");
    b.e_initial = get_num(e, where, "e_initial_kwh");
    const std::string rule = get_str(e, where, "terminal_rule");
    if (rule == "free")
      b.terminal_rule = TerminalRule::free_terminal;
    else if (rule == "at_least_initial")
      b.terminal_rule = TerminalRule::at_least_initial;
    else
      throw CaseIoError(where + ": terminal_rule must be \"free\" or \"at_least_initial\"");
    c.batteries.push_back(std::move(b));
  }

  arr = expect_array(root, "pipes");
  for (size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "pipes[" + std::to_string(i) + "]";
    const json& e = element(arr, i, where);
    check_keys(e, where, {"id", "from", "to", "c_p", "pi0_from", "pi0_to", "f_max_skcf_hr"});
    GasPipe p;
    p.id = get_str(e, where, "id");
    p.from = get_str(e, where, "from");
    p.to = get_str(e, where, "to");
    p.c_p = get_num(e, where, "c_p");
    p.pi0_from = get_num(e, where, "pi0_from");
    p.pi0_to = get_num(e, where, "pi0_to");
    p.f_max = get_num(e, where, "f_max_skcf_hr");
    c.pipes.push_back(std::move(p));
  }

  arr = expect_array(root, "suppliers");
  for (size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "suppliers[" + std::to_string(i) + "]";
    const json& e = element(arr, i, where);
    check_keys(e, where, {"id", "gas_hub", "v_min_skcf_hr", "v_max_skcf_hr", "cost_curve"});
    GasSupplier s;
    s.id = get_str(e, where, "id");
    s.gas_hub = get_str(e, where, "gas_hub");
    s.v_min = get_num(e, where, "v_min_skcf_hr");
    s.v_max = get_num(e, where, "v_max_skcf_hr");
    if (!e.contains("cost_curve")) throw CaseIoError(where + ": missing cost_curve");
    s.cost_curve = parse_curve(e["cost_curve"], where + ".cost_curve");
    c.suppliers.push_back(std::move(s));
  }

  arr = expect_array(root, "gas_hubs");
  for (size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "gas_hubs[" + std::to_string(i) + "]";
    const json& e = element(arr, i, where);
    check_keys(e, where, {"id", "pi_min", "pi_max", "heat_demand_skcf_hr"});
    GasHub h;
    h.id = get_str(e, where, "id");
    h.pi_min = get_num(e, where, "pi_min");
    h.pi_max = get_num(e, where, "pi_max");
    h.heat_demand = get_profile(e, where, "heat_demand_skcf_hr", c.horizon);
    c.gas_hubs.push_back(std::move(h));
  }

  const ValidationReport report = validate_case(c);
  if (!report.ok())
    throw CaseIoError(origin + ": case fails validation:\n" + report.to_string());
  return c;
}

MicrogridCase parse_case_text(const std::string& text, const std::string& origin) {
  try {
    return parse_case_impl(text, origin);
  } catch (const CaseIoError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw CaseIoError(origin + ": " + e.what());
  }
}

MicrogridCase parse_case_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CaseIoError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_case_text(ss.str(), path);
}

std::string serialize_case(const MicrogridCase& c) {
  json root;
  root["schema"] = 1;
  root["name"] = c.name;
  root["description"] = c.description;
  root["horizon_hours"] = c.horizon;
  root["base"] = {{"power_kva", c.base.power_kva}, {"pressure", c.base.pressure}};
  root["costs"] = {{"voll_e_usd_per_kwh", c.costs.voll_e},
                   {"voll_g_usd_per_skcf", c.costs.voll_g},
                   {"beta_usd_per_kwh", c.costs.beta},
                   {"xi", c.costs.xi},
                   {"pwl_segments", c.costs.pwl_segments}};
  json arr = json::array();
  for (const auto& h : c.ac_hubs)
    arr.push_back({{"id", h.id},
                   {"v_min_pu", h.v_min},
                   {"v_max_pu", h.v_max},
                   {"demand_p_kw", h.demand_p},
                   {"demand_q_kvar", h.demand_q},
                   {"is_reference", h.is_reference}});
  root["ac_hubs"] = std::move(arr);
  arr = json::array();
  for (const auto& l : c.ac_lines)
    arr.push_back({{"from", l.from},
                   {"to", l.to},
                   {"g_pu", l.g},
                   {"b_pu", l.b},
                   {"sl_max_pu", l.sl_max}});
  root["ac_lines"] = std::move(arr);
  arr = json::array();
  for (const auto& h : c.dc_hubs)
    arr.push_back({{"id", h.id},
                   {"v_min_pu", h.v_min},
                   {"v_max_pu", h.v_max},
                   {"demand_p_kw", h.demand_p}});
  root["dc_hubs"] = std::move(arr);
  arr = json::array();
  for (const auto& l : c.dc_lines)
    arr.push_back({{"from", l.from}, {"to", l.to}, {"r_pu", l.r}, {"sl_max_pu", l.sl_max}});
  root["dc_lines"] = std::move(arr);
  arr = json::array();
  for (const auto& v : c.inverters)
    arr.push_back({{"id", v.id},
                   {"ac_hub", v.ac_hub},
                   {"dc_hub", v.dc_hub},
                   {"p_min_kw", v.p_min},
                   {"p_max_kw", v.p_max},
                   {"q_min_kvar", v.q_min},
                   {"q_max_kvar", v.q_max}});
  root["inverters"] = std::move(arr);
  arr = json::array();
  for (const auto& g : c.turbines)
    arr.push_back({{"id", g.id},
                   {"network", to_string(g.network)},
                   {"hub", g.hub},
                   {"p_min_kw", g.p_min},
                   {"p_max_kw", g.p_max},
                   {"q_min_kvar", g.q_min},
                   {"q_max_kvar", g.q_max},
                   {"fuel_curve", dump_curve(g.fuel_curve)},
                   {"gas_hub", g.gas_hub}});
  root["turbines"] = std::move(arr);
  arr = json::array();
  for (const auto& r : c.renewables)
    arr.push_back({{"id", r.id},
                   {"kind", to_string(r.kind)},
                   {"network", to_string(r.network)},
                   {"hub", r.hub},
                   {"forecast_kw", r.forecast}});
  root["renewables"] = std::move(arr);
  arr = json::array();
  for (const auto& b : c.batteries)
    arr.push_back({{"id", b.id},
                   {"dc_hub", b.dc_hub},
                   {"p_ch_min_kw", b.p_ch_min},
                   {"p_ch_max_kw", b.p_ch_max},
                   {"p_dc_min_kw", b.p_dc_min},
                   {"p_dc_max_kw", b.p_dc_max},
                   {"eta_ch", b.eta_ch},
                   {"eta_dc", b.eta_dc},
                   {"e_min_kwh", b.e_min},
                   {"e_max_kwh", b.e_max},
                   {"e_initial_kwh", b.e_initial},
                   {"terminal_rule",
                    b.terminal_rule == TerminalRule::free_terminal ? "free" : "at_least_initial"}});
  root["batteries"] = std::move(arr);
  arr = json::array();
  for (const auto& p : c.pipes)
    arr.push_back({{"id", p.id},
                   {"from", p.from},
                   {"to", p.to},
                   {"c_p", p.c_p},
                   {"pi0_from", p.pi0_from},
                   {"pi0_to", p.pi0_to},
                   {"f_max_skcf_hr", p.f_max}});
  root["pipes"] = std::move(arr);
  arr = json::array();
  for (const auto& s : c.suppliers)
    arr.push_back({{"id", s.id},
                   {"gas_hub", s.gas_hub},
                   {"v_min_skcf_hr", s.v_min},
                   {"v_max_skcf_hr", s.v_max},
                   {"cost_curve", dump_curve(s.cost_curve)}});
  root["suppliers"] = std::move(arr);
  arr = json::array();
  for (const auto& h : c.gas_hubs)
    arr.push_back({{"id", h.id},
                   {"pi_min", h.pi_min},
                   {"pi_max", h.pi_max},
                   {"heat_demand_skcf_hr", h.heat_demand}});
  root["gas_hubs"] = std::move(arr);
  return root.dump(2) + "\n";
}

void write_case_file(const MicrogridCase& c, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CaseIoError("cannot open " + path + " for writing");
  f << serialize_case(c);
  f.flush();
  if (!f) throw CaseIoError("write failed for " + path);
}

}  // namespace mecgrid
