#pragma once

// Best-first branch and bound over the LP relaxation. Nodes are ordered by
// their parent's relaxation objective, branching picks the most fractional
// binary. Because the dispatch models give binaries zero cost, a rounding
// heuristic usually closes the gap at the root node.

#include "mecgrid/build_milp.hpp"
#include "mecgrid/milp.hpp"
#include "mecgrid/simplex.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace mecgrid {

struct BnbOptions {
  double rel_gap = 1e-6;
  double int_tol = 1e-6;
  int node_limit = 200000;
  double time_limit_sec = 600.0;
  bool round_heuristic = true;
  LpOptions lp;
};

struct MilpSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  double objective = 0.0;   // incumbent, offset included
  double best_bound = 0.0;
  std::vector<double> x;
  int nodes_explored = 0;
  int lp_iterations = 0;
  // objective of each successive incumbent, for gap monitoring
  std::vector<double> incumbent_history;
};

MilpSolution solve_milp(const MilpProblem& p, const BnbOptions& opts = {});

// Checks a candidate point against every row and bound of the problem.
bool is_feasible_point(const MilpProblem& p, const std::vector<double>& x, double tol);

// Solve engines are pluggable by name so an external solver can be swapped
// in without touching call sites. "reference" is built in.
class MilpBackend {
 public:
  virtual ~MilpBackend() = default;
  virtual std::string name() const = 0;
  virtual MilpSolution solve(const MilpProblem& p, const BnbOptions& opts) = 0;
};

using BackendFactory = std::function<std::unique_ptr<MilpBackend>()>;

void register_backend(const std::string& name, BackendFactory factory);
std::vector<std::string> backend_names();
// Throws std::invalid_argument for an unknown name.
std::unique_ptr<MilpBackend> make_backend(const std::string& name);

}  // namespace mecgrid
