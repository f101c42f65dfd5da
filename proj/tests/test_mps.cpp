#include <doctest.h>

#include "mecgrid/milp.hpp"
#include "mecgrid/mps.hpp"

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace mecgrid;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MilpProblem sample_problem() {
  MilpProblem p;
  const int a = p.add_variable("boxed", VarKind::continuous, 0.0, 4.0);
  const int b = p.add_variable("shifted", VarKind::continuous, -1.0, 5.0);
  const int c = p.add_variable("free", VarKind::continuous, -kInf, kInf);
  const int d = p.add_variable("pinned", VarKind::continuous, 3.0, 3.0);
  const int e = p.add_variable("flag", VarKind::binary, 0.0, 1.0);
  const int f = p.add_variable("capped", VarKind::continuous, -kInf, 2.0);
  p.add_variable("idle", VarKind::continuous, 0.0, 1.0);
  p.set_objective(a, 1.0);
  p.set_objective(b, -2.0);
  p.objective_offset = 2.5;

  auto& r0 = p.add_row("cap", RowSense::le, 10.0);
  r0.coeffs = {{a, 1.0}, {b, 2.0}};
  auto& r1 = p.add_row("floor", RowSense::ge, -2.0);
  r1.coeffs = {{c, 1.0}, {d, -1.0}};
  auto& r2 = p.add_row("tie", RowSense::eq, 1.0);
  r2.coeffs = {{e, 1.0}, {f, 1.0}};
  return p;
}

bool has_line_with(const std::string& text, std::initializer_list<const char*> pieces) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    bool all = true;
    size_t at = 0;
    for (const char* piece : pieces) {
      const auto hit = line.find(piece, at);
      if (hit == std::string::npos) {
        all = false;
        break;
      }
      at = hit + std::string(piece).size();
    }
    if (all) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("sections appear in fixed order with name comments") {
  std::ostringstream os;
  write_mps(sample_problem(), os);
  const std::string t = os.str();

  const auto name = t.find("NAME");
  const auto rows = t.find("\nROWS\n");
  const auto cols = t.find("\nCOLUMNS\n");
  const auto rhs = t.find("\nRHS\n");
  const auto bounds = t.find("\nBOUNDS\n");
  const auto end = t.find("\nENDATA\n");
  REQUIRE(name == 0);
  REQUIRE(rows != std::string::npos);
  REQUIRE(cols > rows);
  REQUIRE(rhs > cols);
  REQUIRE(bounds > rhs);
  REQUIRE(end > bounds);

  CHECK(has_line_with(t, {"* ROW", "R0000001", "cap"}));
  CHECK(has_line_with(t, {"* COLUMN", "C0000005", "flag"}));
  CHECK(has_line_with(t, {"N", "OBJ"}));
  CHECK(has_line_with(t, {"L", "R0000001"}));
  CHECK(has_line_with(t, {"G", "R0000002"}));
  CHECK(has_line_with(t, {"E", "R0000003"}));
}

TEST_CASE("binary runs are bracketed by integrality markers") {
  std::ostringstream os;
  write_mps(sample_problem(), os);
  const std::string t = os.str();
  const auto org = t.find("'INTORG'");
  const auto endm = t.find("'INTEND'");
  REQUIRE(org != std::string::npos);
  REQUIRE(endm != std::string::npos);
  CHECK(org < endm);
  const auto flag_entry = t.find("C0000005", t.find("COLUMNS"));
  CHECK(flag_entry > org);
  CHECK(flag_entry < endm);
}

TEST_CASE("bound codes cover every variable shape") {
  std::ostringstream os;
  write_mps(sample_problem(), os);
  const std::string t = os.str();
  CHECK(has_line_with(t, {"UP", "BND", "C0000001", "4"}));
  CHECK(has_line_with(t, {"LO", "BND", "C0000002", "-1"}));
  CHECK(has_line_with(t, {"UP", "BND", "C0000002", "5"}));
  CHECK(has_line_with(t, {"FR", "BND", "C0000003"}));
  CHECK(has_line_with(t, {"FX", "BND", "C0000004", "3"}));
  CHECK(has_line_with(t, {"BV", "BND", "C0000005"}));
  CHECK(has_line_with(t, {"MI", "BND", "C0000006"}));
  CHECK(has_line_with(t, {"UP", "BND", "C0000006", "2"}));
}

TEST_CASE("objective constant lands in the rhs with flipped sign") {
  std::ostringstream os;
  write_mps(sample_problem(), os);
  CHECK(has_line_with(os.str(), {"RHS", "OBJ", "-2.5"}));
  CHECK(has_line_with(os.str(), {"RHS", "R0000001", "10"}));
  CHECK(has_line_with(os.str(), {"RHS", "R0000002", "-2"}));
}

TEST_CASE("columns with no entries are still declared") {
  std::ostringstream os;
  write_mps(sample_problem(), os);
  CHECK(has_line_with(os.str(), {"C0000007", "OBJ", "0"}));
}

TEST_CASE("output is deterministic and file writing matches the stream") {
  const auto p = sample_problem();
  std::ostringstream a, b;
  write_mps(p, a, "SAMPLE");
  write_mps(p, b, "SAMPLE");
  CHECK(a.str() == b.str());

  const std::string path = "/tmp/mecgrid_sample.mps";
  write_mps_file(p, path, "SAMPLE");
  std::ifstream f(path, std::ios::binary);
  std::ostringstream file_content;
  file_content << f.rdbuf();
  CHECK(file_content.str() == a.str());
  std::filesystem::remove(path);

  CHECK_THROWS_AS(write_mps_file(p, "/nonexistent-dir/x.mps"), std::runtime_error);
}
