#include "mecgrid/mps.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mecgrid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string short_name(char prefix, int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%07d", prefix, i + 1);
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void pad_to(std::string& line, size_t col) {
  if (line.size() < col) line.append(col - line.size(), ' ');
}

// classic field layout: 2-3, 5-12, 15-22, 25-36, 40-47, 50-61 (1-based)
void data_line(std::ostream& os, const std::string& f1, const std::string& f2,
               const std::string& f3 = "", const std::string& f4 = "",
               const std::string& f5 = "", const std::string& f6 = "") {
  std::string line;
  pad_to(line, 1);
  line += f1;
  if (!f2.empty()) { pad_to(line, 4); line += f2; }
  if (!f3.empty()) { pad_to(line, 14); line += f3; }
  if (!f4.empty()) { pad_to(line, 24); line += f4; }
  if (!f5.empty()) { pad_to(line, 39); line += f5; }
  if (!f6.empty()) { pad_to(line, 49); line += f6; }
  os << line << '\n';
}

}  // namespace

void write_mps(const MilpProblem& p, std::ostream& os, const std::string& name) {
  os << "NAME          " << name << '\n';
  os << "* minimization; objective constant " << num(p.objective_offset)
     << " carried as negated RHS of OBJ\n";
  for (int i = 0; i < p.num_rows(); ++i)
    os << "* ROW    " << short_name('R', i) << " = " << p.rows[i].name << '\n';
  for (int j = 0; j < p.num_vars(); ++j)
    os << "* COLUMN " << short_name('C', j) << " = " << p.variables[j].name << '\n';

  os << "ROWS\n";
  data_line(os, "N", "OBJ");
  for (int i = 0; i < p.num_rows(); ++i) {
    const char* s = p.rows[i].sense == RowSense::le ? "L"
                    : p.rows[i].sense == RowSense::eq ? "E"
                                                      : "G";
    data_line(os, s, short_name('R', i));
  }

  // entries per column: objective first, then rows in index order
  std::vector<std::vector<std::pair<int, double>>> by_col(p.num_vars());
  for (int i = 0; i < p.num_rows(); ++i)
    for (auto [c, v] : p.rows[i].coeffs)
      if (v != 0.0) by_col[c].emplace_back(i, v);

  os << "COLUMNS\n";
  bool in_int = false;
  for (int j = 0; j < p.num_vars(); ++j) {
    const bool want_int = p.variables[j].kind == VarKind::binary;
    if (want_int != in_int) {
      data_line(os, "", "MARKER", "'MARKER'", "", want_int ? "'INTORG'" : "'INTEND'");
      in_int = want_int;
    }
    const std::string cn = short_name('C', j);
    std::vector<std::pair<std::string, double>> entries;
    if (p.objective[j] != 0.0) entries.emplace_back("OBJ", p.objective[j]);
    for (auto [i, v] : by_col[j]) entries.emplace_back(short_name('R', i), v);
    if (entries.empty()) entries.emplace_back("OBJ", 0.0);  // keep the column declared
    for (size_t k = 0; k < entries.size(); k += 2) {
      if (k + 1 < entries.size())
        data_line(os, "", cn, entries[k].first, num(entries[k].second), entries[k + 1].first,
                  num(entries[k + 1].second));
      else
        data_line(os, "", cn, entries[k].first, num(entries[k].second));
    }
  }
  if (in_int) data_line(os, "", "MARKER", "'MARKER'", "", "'INTEND'");

  os << "RHS\n";
  if (p.objective_offset != 0.0)
    data_line(os, "", "RHS", "OBJ", num(-p.objective_offset));
  for (int i = 0; i < p.num_rows(); ++i)
    if (p.rows[i].rhs != 0.0) data_line(os, "", "RHS", short_name('R', i), num(p.rows[i].rhs));

  os << "BOUNDS\n";
  for (int j = 0; j < p.num_vars(); ++j) {
    const auto& v = p.variables[j];
    const std::string cn = short_name('C', j);
    if (v.kind == VarKind::binary && v.lb == 0.0 && v.ub == 1.0) {
      data_line(os, "BV", "BND", cn);
      continue;
    }
    if (v.lb == v.ub) {
      data_line(os, "FX", "BND", cn, num(v.lb));
      continue;
    }
    if (v.lb == -kInf && v.ub == kInf) {
      data_line(os, "FR", "BND", cn);
      continue;
    }
    if (v.lb == -kInf)
      data_line(os, "MI", "BND", cn);
    else if (v.lb != 0.0)
      data_line(os, "LO", "BND", cn, num(v.lb));
    if (v.ub != kInf) data_line(os, "UP", "BND", cn, num(v.ub));
  }
  os << "ENDATA\n";
}

void write_mps_file(const MilpProblem& p, const std::string& path, const std::string& name) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  write_mps(p, f, name);
  f.flush();
  if (!f) throw std::runtime_error("write failed for " + path);
}

}  // namespace mecgrid
