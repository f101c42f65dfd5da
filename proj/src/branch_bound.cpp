#include "mecgrid/branch_bound.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <queue>
#include <stdexcept>

namespace mecgrid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Node {
  double bound;  // parent relaxation objective, lower bound for the subtree
  long seq;
  std::vector<double> lb, ub;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& c) const {
    if (a.bound != c.bound) return a.bound > c.bound;  // min-heap on bound
    return a.seq > c.seq;                              // then oldest first
  }
};

double fractionality(double v) {
  const double f = v - std::floor(v);
  return std::min(f, 1.0 - f);
}

}  // namespace

bool is_feasible_point(const MilpProblem& p, const std::vector<double>& x, double tol) {
  for (int j = 0; j < p.num_vars(); ++j) {
    const auto& v = p.variables[j];
    const double slack = tol * std::max(1.0, std::max(std::abs(v.lb), std::abs(v.ub)));
    if (x[j] < v.lb - slack || x[j] > v.ub + slack) return false;
  }
  for (const auto& r : p.rows) {
    const double act = p.row_activity(r, x);
    const double slack = tol * std::max(1.0, std::abs(r.rhs));
    switch (r.sense) {
      case RowSense::le:
        if (act > r.rhs + slack) return false;
        break;
      case RowSense::ge:
        if (act < r.rhs - slack) return false;
        break;
      case RowSense::eq:
        if (std::abs(act - r.rhs) > slack) return false;
        break;
    }
  }
  return true;
}

MilpSolution solve_milp(const MilpProblem& p, const BnbOptions& opts) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };

  MilpSolution sol;
  std::vector<int> bins;
  for (int j = 0; j < p.num_vars(); ++j)
    if (p.variables[j].kind == VarKind::binary) bins.push_back(j);

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long seq = 0;
  {
    Node root;
    root.bound = -kInf;
    root.seq = seq++;
    root.lb.resize(p.num_vars());
    root.ub.resize(p.num_vars());
    for (int j = 0; j < p.num_vars(); ++j) {
      root.lb[j] = p.variables[j].lb;
      root.ub[j] = p.variables[j].ub;
    }
    open.push(std::move(root));
  }

  bool have_inc = false;
  double inc_obj = kInf;
  std::vector<double> inc_x;
  double best_open_bound = -kInf;
  bool hit_limit = false;

  auto gap_closed = [&](double bound) {
    return have_inc && inc_obj - bound <= opts.rel_gap * std::max(1.0, std::abs(inc_obj));
  };

  auto try_incumbent = [&](std::vector<double> cand) {
    for (int j : bins) cand[j] = std::round(cand[j]);
    if (!is_feasible_point(p, cand, 1e-6)) return false;
    const double obj = p.objective_value(cand);
    if (have_inc && obj >= inc_obj) return false;
    have_inc = true;
    inc_obj = obj;
    inc_x = std::move(cand);
    sol.incumbent_history.push_back(obj);
    return true;
  };

  while (!open.empty()) {
    if (sol.nodes_explored >= opts.node_limit || elapsed() > opts.time_limit_sec) {
      hit_limit = true;
      break;
    }
    Node node = open.top();
    open.pop();
    best_open_bound = node.bound;
    if (gap_closed(node.bound)) {  // best-first: everything left prunes too
      while (!open.empty()) open.pop();
      best_open_bound = inc_obj;
      break;
    }

    LpResult lp = solve_lp(p, opts.lp, &node.lb, &node.ub);
    ++sol.nodes_explored;
    sol.lp_iterations += lp.iterations;

    if (lp.status == LpStatus::infeasible) continue;
    if (lp.status == LpStatus::unbounded) {
      if (sol.nodes_explored == 1) {
        sol.status = SolveStatus::unbounded;
        return sol;
      }
      sol.status = SolveStatus::numerical_failure;
      return sol;
    }
    if (lp.status != LpStatus::optimal) {
      if (have_inc) break;  // keep what we have
      sol.status = lp.status == LpStatus::iteration_limit ? SolveStatus::limit
                                                          : SolveStatus::numerical_failure;
      return sol;
    }
    if (have_inc && gap_closed(lp.objective)) continue;

    int branch_col = -1;
    double worst = opts.int_tol;
    for (int j : bins) {
      const double f = fractionality(lp.x[j]);
      if (f > worst) {
        worst = f;
        branch_col = j;
      }
    }

    if (branch_col < 0) {  // integral point
      try_incumbent(lp.x);
      continue;
    }

    if (opts.round_heuristic) {
      // zero-cost indicators often admit a feasible rounding at the
      // relaxation objective, which closes the gap immediately
      std::vector<double> up = lp.x;
      for (int j : bins)
        if (fractionality(up[j]) > opts.int_tol) up[j] = std::min(std::ceil(up[j]), node.ub[j]);
      try_incumbent(std::move(up));
      if (gap_closed(lp.objective)) continue;
      try_incumbent(lp.x);  // plain rounding to nearest
      if (gap_closed(lp.objective)) continue;
    }

    Node down;
    down.bound = lp.objective;
    down.seq = seq++;
    down.lb = node.lb;
    down.ub = node.ub;
    down.ub[branch_col] = 0.0;
    Node upn;
    upn.bound = lp.objective;
    upn.seq = seq++;
    upn.lb = std::move(node.lb);
    upn.ub = std::move(node.ub);
    upn.lb[branch_col] = 1.0;
    open.push(std::move(down));
    open.push(std::move(upn));
  }

  if (hit_limit) {
    if (!open.empty()) best_open_bound = open.top().bound;
    sol.status = have_inc ? SolveStatus::feasible : SolveStatus::limit;
  } else {
    sol.status = have_inc ? SolveStatus::optimal : SolveStatus::infeasible;
    if (have_inc) best_open_bound = inc_obj;
  }
  if (have_inc) {
    sol.objective = inc_obj;
    sol.x = std::move(inc_x);
  }
  sol.best_bound = best_open_bound;
  return sol;
}

namespace {

class ReferenceBackend : public MilpBackend {
 public:
  std::string name() const override { return "reference"; }
  MilpSolution solve(const MilpProblem& p, const BnbOptions& opts) override {
    return solve_milp(p, opts);
  }
};

std::map<std::string, BackendFactory>& registry() {
  static std::map<std::string, BackendFactory> reg = [] {
    std::map<std::string, BackendFactory> r;
    r.emplace("reference", [] { return std::unique_ptr<MilpBackend>(new ReferenceBackend()); });
    return r;
  }();
  return reg;
}

}  // namespace

void register_backend(const std::string& name, BackendFactory factory) {
  registry()[name] = std::move(factory);
}

std::vector<std::string> backend_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : registry()) out.push_back(k);
  return out;
}

std::unique_ptr<MilpBackend> make_backend(const std::string& name) {
  auto it = registry().find(name);
  if (it == registry().end())
    throw std::invalid_argument("unknown solve backend \"" + name +
                                "\"; available: " + [] {
                                  std::string s;
                                  for (const auto& n : backend_names()) {
                                    if (!s.empty()) s += ", ";
                                    s += n;
                                  }
                                  return s;
                                }());
  return it->second();
}

}  // namespace mecgrid
