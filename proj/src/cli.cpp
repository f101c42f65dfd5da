#include "mecgrid/cli.hpp"

#include "mecgrid/analysis.hpp"
#include "mecgrid/branch_bound.hpp"
#include "mecgrid/build_milp.hpp"
#include "mecgrid/caseio.hpp"
#include "mecgrid/results_io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace mecgrid {

namespace {

struct CmdArgs {
  std::string input;
  std::string out_dir;
  std::string backend;
  std::string param;
  std::vector<double> values;
  int segments = 0;     // 0: keep the case's own setting
  double gap = -1.0;    // <0: keep default
};

std::string pick_backend(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("MECGRID_BACKEND"); env && *env) return env;
  return "reference";
}

BnbOptions make_options(const CmdArgs& a) {
  BnbOptions opts;
  if (a.gap >= 0.0) opts.rel_gap = a.gap;
  return opts;
}

MicrogridCase load_case(const CmdArgs& a) {
  MicrogridCase c = parse_case_file(a.input);
  if (a.segments > 0) {
    c.costs.pwl_segments = a.segments;
    const auto report = validate_case(c);
    if (!report.ok())
      throw CaseIoError(a.input + " with --segments " + std::to_string(a.segments) +
                        ": " + report.to_string());
  }
  return c;
}

void print_metrics(std::ostream& out, const SummaryMetrics& m) {
  out << "status: " << to_string(m.status) << '\n'
      << "objective_cost_usd: " << format_number(m.objective_cost) << '\n'
      << "lost_load_kwh: " << format_number(m.lost_load_kwh) << '\n'
      << "lost_heat_skcf: " << format_number(m.lost_heat_skcf) << '\n'
      << "heat_served_fraction: " << format_number(m.heat_served_fraction) << '\n'
      << "fuel_cost_usd: " << format_number(m.fuel_cost) << '\n'
      << "degradation_cost_usd: " << format_number(m.degradation_cost) << '\n'
      << "total_generation_kwh: " << format_number(m.total_generation_kwh) << '\n';
}

int do_plan(const CmdArgs& a, std::ostream& out, std::ostream& err) {
  const MicrogridCase c = load_case(a);
  const auto backend = make_backend(pick_backend(a.backend));
  const BuiltModel model = build_problem(c);
  const MilpSolution sol = backend->solve(model.problem, make_options(a));
  if (sol.status != SolveStatus::optimal && sol.status != SolveStatus::feasible) {
    err << "no usable solution: " << to_string(sol.status) << '\n';
    return 1;
  }
  const DispatchSchedule sched = extract_solution(model, sol.x, sol.objective, sol.status);
  const SummaryMetrics metrics = compute_metrics(c, sched);
  write_results(c, sched, metrics, a.out_dir);
  print_metrics(out, metrics);
  return sol.status == SolveStatus::optimal ? 0 : 1;
}

int do_sweep(const CmdArgs& a, std::ostream& out, std::ostream& err) {
  const MicrogridCase c = load_case(a);
  const auto backend = make_backend(pick_backend(a.backend));
  const auto table = sweep(c, a.param, a.values, make_options(a), backend.get());
  write_sweep_results(a.param, table, a.out_dir);
  out << "param,value,status,lost_load_kwh,heat_served_fraction,objective_cost_usd\n";
  bool all_ok = true;
  for (const auto& row : table) {
    out << a.param << ',' << format_number(row.value) << ',' << to_string(row.status);
    if (row.solved)
      out << ',' << format_number(row.metrics.lost_load_kwh) << ','
          << format_number(row.metrics.heat_served_fraction) << ','
          << format_number(row.metrics.objective_cost);
    else
      out << ",,,";
    out << '\n';
    all_ok = all_ok && row.solved && row.status == SolveStatus::optimal;
  }
  if (!all_ok) err << "one or more sweep points did not solve to optimality\n";
  return all_ok ? 0 : 1;
}

int do_validate(const CmdArgs& a, std::ostream& out) {
  const MicrogridCase c = parse_case_file(a.input);  // throws on any problem
  out << "ok: " << c.name << " (" << c.ac_hubs.size() << " ac hubs, " << c.dc_hubs.size()
      << " dc hubs, " << c.gas_hubs.size() << " gas hubs, horizon " << c.horizon << ")\n";
  return 0;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

// per-id hourly series, column order = first appearance
struct Series {
  std::vector<std::string> ids;
  std::map<std::string, std::vector<double>> data;

  void add(const std::string& id, int hour, double v, int horizon) {
    auto it = data.find(id);
    if (it == data.end()) {
      ids.push_back(id);
      it = data.emplace(id, std::vector<double>(horizon, 0.0)).first;
    }
    if ((int)it->second.size() < hour) it->second.resize(hour, 0.0);
    it->second[hour - 1] += v;
  }
};

int do_report(const CmdArgs& a, std::ostream& out, std::ostream& err) {
  const std::string sched_path = a.out_dir + "/schedule.csv";
  std::ifstream f(sched_path, std::ios::binary);
  if (!f) {
    err << "cannot open " << sched_path << " (run `plan --out " << a.out_dir << "` first)\n";
    return 2;
  }
  std::string line;
  std::getline(f, line);  // header
  Series gen, gas_supply, pressure;
  std::vector<double> served, discharge, heat;
  int horizon = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < 6) {
      err << sched_path << ": malformed line: " << line << '\n';
      return 2;
    }
    const int hour = std::atoi(fields[0].c_str());
    const std::string& id = fields[2];
    const std::string& qty = fields[3];
    const double value = std::atof(fields[4].c_str());
    horizon = std::max(horizon, hour);
    auto at = [&](std::vector<double>& v) -> double& {
      if ((int)v.size() < hour) v.resize(hour, 0.0);
      return v[hour - 1];
    };
    if (qty == "P_g" || qty == "P_w" || qty == "P_s")
      gen.add(id, hour, value, horizon);
    else if (qty == "P_dc")
      at(discharge) += value;
    else if (qty == "P_d")
      at(served) += value;
    else if (qty == "v_gs")
      gas_supply.add(id, hour, value, horizon);
    else if (qty == "g_d")
      at(heat) += value;
    else if (qty == "pi")
      pressure.add(id, hour, value, horizon);
  }
  if (horizon == 0) {
    err << sched_path << ": no data rows\n";
    return 2;
  }
  served.resize(horizon, 0.0);
  discharge.resize(horizon, 0.0);
  heat.resize(horizon, 0.0);

  {
    std::ostringstream os;
    os << "hour";
    for (const auto& id : gen.ids) os << ',' << id;
    os << ",battery_discharge_kw,served_load_kw\n";
    for (int t = 0; t < horizon; ++t) {
      os << (t + 1);
      for (const auto& id : gen.ids) {
        const auto& v = gen.data[id];
        os << ',' << format_number(t < (int)v.size() ? v[t] : 0.0);
      }
      os << ',' << format_number(discharge[t]) << ',' << format_number(served[t]) << '\n';
    }
    write_file_atomic(a.out_dir, "generation.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "hour";
    for (const auto& id : gas_supply.ids) os << ',' << id;
    os << ",heat_served_skcf";
    for (const auto& id : pressure.ids) os << ",pi_" << id;
    os << '\n';
    for (int t = 0; t < horizon; ++t) {
      os << (t + 1);
      for (const auto& id : gas_supply.ids) {
        const auto& v = gas_supply.data[id];
        os << ',' << format_number(t < (int)v.size() ? v[t] : 0.0);
      }
      os << ',' << format_number(heat[t]);
      for (const auto& id : pressure.ids) {
        const auto& v = pressure.data[id];
        os << ',' << format_number(t < (int)v.size() ? v[t] : 0.0);
      }
      os << '\n';
    }
    write_file_atomic(a.out_dir, "gas.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "set datafile separator ','\n"
          "set key outside autotitle columnhead\n"
          "set grid\n"
          "set style data lines\n"
          "set xlabel 'hour'\n"
          "set terminal pngcairo size 1100,650\n"
          "\n"
          "set output 'fig_generation.png'\n"
          "set ylabel 'kW'\n"
          "ncols = "
       << (gen.ids.size() + 2)
       << "\nplot for [i=2:ncols+1] 'generation.csv' using 1:i\n"
          "\n"
          "set output 'fig_battery.png'\n"
          "set ylabel 'kWh / kW'\n"
          "plot 'battery.csv' using 1:3 title 'E (kWh)', 'battery.csv' using 1:4 title "
          "'charge (kW)', 'battery.csv' using 1:5 title 'discharge (kW)'\n"
          "\n"
          "set output 'fig_gas.png'\n"
          "set ylabel 'Skcf/hr / pressure'\n"
          "gcols = "
       << (gas_supply.ids.size() + 1 + pressure.ids.size())
       << "\nplot for [i=2:gcols+1] 'gas.csv' using 1:i\n";
    write_file_atomic(a.out_dir, "figures.gp", os.str());
  }
  out << "report files written to " << a.out_dir
      << ": generation.csv, gas.csv, figures.gp\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"day-ahead planner for a hybrid AC/DC microgrid with a gas network"};
  app.require_subcommand(1);
  CmdArgs a;

  auto add_common = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--input", a.input, "case file (JSON)")->required();
    if (needs_out) cmd->add_option("--out", a.out_dir, "output directory")->required();
    cmd->add_option("--segments", a.segments, "piecewise segments per curve")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--gap", a.gap, "relative optimality gap")->check(CLI::NonNegativeNumber);
    cmd->add_option("--backend", a.backend,
                    "solve backend (default: MECGRID_BACKEND or \"reference\")");
  };

  CLI::App* plan = app.add_subcommand("plan", "solve a case and write result files");
  add_common(plan, true);
  CLI::App* swp = app.add_subcommand("sweep", "re-solve while varying one parameter");
  add_common(swp, true);
  swp->add_option("--param", a.param, "parameter path, e.g. inverters[0].p_max")->required();
  swp->add_option("--values", a.values, "comma-separated values")->delimiter(',')->required();
  CLI::App* val = app.add_subcommand("validate", "parse and validate a case file");
  val->add_option("--input", a.input, "case file (JSON)")->required();
  CLI::App* rep = app.add_subcommand("report", "derive plot-ready files from plan outputs");
  rep->add_option("--out", a.out_dir, "directory holding plan outputs")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return 2;
  }

  try {
    if (plan->parsed()) return do_plan(a, out, err);
    if (swp->parsed()) return do_sweep(a, out, err);
    if (val->parsed()) return do_validate(a, out);
    if (rep->parsed()) return do_report(a, out, err);
  } catch (const CaseIoError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace mecgrid
