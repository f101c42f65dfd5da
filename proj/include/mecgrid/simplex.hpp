#pragma once

// Bounded-variable two-phase revised primal simplex. Works directly on a
// MilpProblem, treating every column as continuous; integrality is the
// branch-and-bound layer's job. Rows become equalities through one slack
// each, artificial columns patch rows whose slack cannot absorb the
// initial residual. The basis is kept as a sparse LU factorization plus
// product-form eta updates, refactorized periodically.

#include "mecgrid/milp.hpp"

#include <string>
#include <vector>

namespace mecgrid {

enum class LpStatus : uint8_t {
  optimal,
  infeasible,
  unbounded,
  iteration_limit,
  numerical_failure,
};

const char* to_string(LpStatus s);

struct LpOptions {
  double feas_tol = 1e-7;   // primal bound violation allowance
  double opt_tol = 1e-7;    // dual tolerance, scaled by max(1, |cost|_inf)
  double pivot_tol = 1e-9;  // smallest acceptable pivot element
  int max_iters = 200000;
  int refactor_every = 100;   // pivots between LU rebuilds
  int bland_threshold = 60;   // degenerate pivots before Bland's rule kicks in
};

struct LpResult {
  LpStatus status = LpStatus::numerical_failure;
  double objective = 0.0;             // includes the problem's constant offset
  std::vector<double> x;              // structural columns only
  std::vector<double> duals;          // one multiplier per row
  std::vector<double> reduced_costs;  // structural columns, cost - y'A
  int iterations = 0;
  int phase1_iterations = 0;
};

// Solves the LP relaxation. Optional bound vectors (sized like the
// variables) replace the problem's own bounds; branch and bound uses this
// to fix binaries without copying the problem.
LpResult solve_lp(const MilpProblem& p, const LpOptions& opts = {},
                  const std::vector<double>* lb_override = nullptr,
                  const std::vector<double>* ub_override = nullptr);

}  // namespace mecgrid
