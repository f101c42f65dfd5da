#include "mecgrid/simplex.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mecgrid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum VStat : int8_t { kAtLower, kAtUpper, kFreeNb, kBasic };

struct Engine {
  const LpOptions& opts;
  int m = 0;        // rows
  int n_struct = 0; // structural columns
  int n = 0;        // + slacks + artificials

  std::vector<std::vector<std::pair<int, double>>> cols;  // (row, value)
  std::vector<double> lb, ub;
  std::vector<double> cost;       // current phase costs
  std::vector<double> b;

  std::vector<int> basic_of_row;
  std::vector<int8_t> vstat;
  std::vector<double> x;

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  std::vector<std::pair<int, Eigen::VectorXd>> etas;  // (basis position, B^-1 a_q)
  int pivots_since_refactor = 0;

  std::vector<double> devex;
  int iters = 0;
  int degen_streak = 0;

  // scratch reused across iterations
  Eigen::VectorXd y_, w_, rho_;
  std::vector<double> dj_;

  explicit Engine(const LpOptions& o) : opts(o) {}

  bool fixed(int j) const { return ub[j] - lb[j] <= 0.0; }

  bool refactor() {
    std::vector<Eigen::Triplet<double>> trips;
    for (int r = 0; r < m; ++r)
      for (auto [row, v] : cols[basic_of_row[r]]) trips.emplace_back(row, r, v);
    Eigen::SparseMatrix<double> B(m, m);
    B.setFromTriplets(trips.begin(), trips.end());
    lu.compute(B);
    etas.clear();
    pivots_since_refactor = 0;
    return lu.info() == Eigen::Success;
  }

  void ftran(Eigen::VectorXd& v) {
    v = lu.solve(v);
    for (const auto& [r, eta] : etas) {
      const double t = v[r] / eta[r];
      v.noalias() -= eta * t;
      v[r] = t;
    }
  }

  void btran(Eigen::VectorXd& v) {
    for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
      const int r = it->first;
      const auto& eta = it->second;
      const double t = v[r] - (eta.dot(v) - eta[r] * v[r]);
      v[r] = t / eta[r];
    }
    v = lu.transpose().solve(v);
  }

  void recompute_basics() {
    Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(b.data(), m);
    for (int j = 0; j < n; ++j) {
      if (vstat[j] == kBasic || x[j] == 0.0) continue;
      for (auto [row, v] : cols[j]) r[row] -= v * x[j];
    }
    ftran(r);
    for (int pos = 0; pos < m; ++pos) x[basic_of_row[pos]] = r[pos];
  }

  double column_dot(int j, const Eigen::VectorXd& v) const {
    double s = 0.0;
    for (auto [row, val] : cols[j]) s += val * v[row];
    return s;
  }

  // price all movable nonbasic columns; returns entering column or -1
  int price(bool bland, double tol_d) {
    y_.resize(m);
    for (int r = 0; r < m; ++r) y_[r] = cost[basic_of_row[r]];
    btran(y_);
    dj_.assign(n, 0.0);
    int best = -1;
    double best_score = 0.0;
    for (int j = 0; j < n; ++j) {
      if (vstat[j] == kBasic || fixed(j)) continue;
      const double d = cost[j] - column_dot(j, y_);
      dj_[j] = d;
      bool eligible = false;
      if (vstat[j] == kAtLower)
        eligible = d < -tol_d;
      else if (vstat[j] == kAtUpper)
        eligible = d > tol_d;
      else
        eligible = std::abs(d) > tol_d;
      if (!eligible) continue;
      if (bland) return j;
      const double score = d * d / devex[j];
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    return best;
  }

  struct Ratio {
    double step = kInf;
    int row = -1;       // -1: entering hits its own opposite bound
    bool to_upper = false;  // leaving variable exits at its upper bound
  };

  Ratio ratio_test(int q, int dir, const Eigen::VectorXd& w) const {
    const double range = ub[q] - lb[q];
    // pass 1: largest step allowed when bounds are relaxed by feas_tol
    double theta_max = range;
    for (int r = 0; r < m; ++r) {
      const double delta = dir * w[r];
      if (std::abs(delta) <= opts.pivot_tol) continue;
      const int j = basic_of_row[r];
      if (delta > 0.0) {
        if (lb[j] == -kInf) continue;
        theta_max = std::min(theta_max, (x[j] - lb[j] + opts.feas_tol) / delta);
      } else {
        if (ub[j] == kInf) continue;
        theta_max = std::min(theta_max, (ub[j] + opts.feas_tol - x[j]) / -delta);
      }
    }
    Ratio out;
    if (theta_max == kInf) return out;  // nothing blocks
    // pass 2: among rows whose exact limit fits inside theta_max, take the
    // one with the largest pivot element
    double best_pivot = 0.0;
    double strict_min = range;
    for (int r = 0; r < m; ++r) {
      const double delta = dir * w[r];
      if (std::abs(delta) <= opts.pivot_tol) continue;
      const int j = basic_of_row[r];
      double limit;
      bool upper;
      if (delta > 0.0) {
        if (lb[j] == -kInf) continue;
        limit = (x[j] - lb[j]) / delta;
        upper = false;
      } else {
        if (ub[j] == kInf) continue;
        limit = (ub[j] - x[j]) / -delta;
        upper = true;
      }
      if (limit < 0.0) limit = 0.0;
      strict_min = std::min(strict_min, limit);
      if (limit <= theta_max && std::abs(delta) > best_pivot) {
        best_pivot = std::abs(delta);
        out.row = r;
        out.step = limit;
        out.to_upper = upper;
      }
    }
    if (out.row < 0) {
      out.step = strict_min;  // entering reaches its opposite bound first
      return out;
    }
    if (range < out.step) {
      out.row = -1;
      out.step = range;
    }
    return out;
  }

  void apply_step(int q, int dir, const Eigen::VectorXd& w, double step) {
    if (step == 0.0) return;
    x[q] += dir * step;
    for (int r = 0; r < m; ++r) {
      const double d = w[r];
      if (d != 0.0) x[basic_of_row[r]] -= d * dir * step;
    }
  }

  void devex_update(int q, int r_leave, const Eigen::VectorXd& w) {
    rho_.setZero(m);
    rho_[r_leave] = 1.0;
    btran(rho_);
    const double alpha_q = w[r_leave];
    if (alpha_q == 0.0) return;
    const double wq = std::max(devex[q], 1.0);
    double biggest = 1.0;
    for (int j = 0; j < n; ++j) {
      if (vstat[j] == kBasic || fixed(j) || j == q) continue;
      const double alpha = column_dot(j, rho_);
      if (alpha == 0.0) continue;
      const double cand = (alpha / alpha_q) * (alpha / alpha_q) * wq;
      if (cand > devex[j]) devex[j] = cand;
      biggest = std::max(biggest, devex[j]);
    }
    devex[basic_of_row[r_leave]] = std::max(wq / (alpha_q * alpha_q), 1.0);
    if (biggest > 1e7) std::fill(devex.begin(), devex.end(), 1.0);
  }

  // runs the current phase to optimality; phase costs must be in `cost`
  LpStatus run_phase() {
    const double cmax = std::max(
        1.0, std::abs(*std::max_element(cost.begin(), cost.end(),
                                        [](double a, double c) { return std::abs(a) < std::abs(c); })));
    const double tol_d = opts.opt_tol * cmax;
    std::fill(devex.begin(), devex.end(), 1.0);
    degen_streak = 0;
    while (true) {
      if (iters >= opts.max_iters) return LpStatus::iteration_limit;
      if (pivots_since_refactor >= opts.refactor_every) {
        if (!refactor()) return LpStatus::numerical_failure;
        recompute_basics();
      }
      const bool bland = degen_streak >= opts.bland_threshold;
      const int q = price(bland, tol_d);
      if (q < 0) return LpStatus::optimal;
      int dir;
      if (vstat[q] == kAtUpper)
        dir = -1;
      else if (vstat[q] == kFreeNb)
        dir = dj_[q] > 0.0 ? -1 : 1;
      else
        dir = 1;

      w_.setZero(m);
      for (auto [row, v] : cols[q]) w_[row] = v;
      ftran(w_);

      Ratio rt = ratio_test(q, dir, w_);
      ++iters;
      if (rt.row < 0 && rt.step == kInf) return LpStatus::unbounded;

      if (rt.row < 0) {  // bound flip, basis unchanged
        apply_step(q, dir, w_, rt.step);
        x[q] = dir > 0 ? ub[q] : lb[q];
        vstat[q] = dir > 0 ? kAtUpper : kAtLower;
        degen_streak = 0;
        continue;
      }

      const int leaving = basic_of_row[rt.row];
      apply_step(q, dir, w_, rt.step);
      x[leaving] = rt.to_upper ? ub[leaving] : lb[leaving];
      vstat[leaving] = rt.to_upper ? kAtUpper : kAtLower;
      vstat[q] = kBasic;
      devex_update(q, rt.row, w_);
      basic_of_row[rt.row] = q;
      etas.emplace_back(rt.row, w_);
      ++pivots_since_refactor;
      if (rt.step > 1e-12)
        degen_streak = 0;
      else
        ++degen_streak;
    }
  }
};

}  // namespace

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
    case LpStatus::numerical_failure: return "numerical_failure";
  }
  return "?";
}

LpResult solve_lp(const MilpProblem& p, const LpOptions& opts,
                  const std::vector<double>* lb_override,
                  const std::vector<double>* ub_override) {
  LpResult res;
  const int m = p.num_rows();
  const int ns = p.num_vars();

  Engine e(opts);
  e.m = m;
  e.n_struct = ns;
  e.cols.resize(ns + m);
  e.lb.resize(ns + m);
  e.ub.resize(ns + m);
  e.b.resize(m);
  for (int j = 0; j < ns; ++j) {
    e.lb[j] = lb_override ? (*lb_override)[j] : p.variables[j].lb;
    e.ub[j] = ub_override ? (*ub_override)[j] : p.variables[j].ub;
    if (e.lb[j] > e.ub[j]) {
      res.status = LpStatus::infeasible;
      return res;
    }
  }
  if (m == 0) {  // pure bound minimization
    res.x.assign(ns, 0.0);
    for (int j = 0; j < ns; ++j) {
      const double c = p.objective[j];
      if (c > 0.0 || (c == 0.0 && e.lb[j] > -kInf))
        res.x[j] = e.lb[j];
      else if (c < 0.0 || e.ub[j] < kInf)
        res.x[j] = e.ub[j];
      if (std::isinf(res.x[j])) {
        res.status = LpStatus::unbounded;
        return res;
      }
    }
    res.status = LpStatus::optimal;
    res.objective = p.objective_value(res.x);
    res.reduced_costs = p.objective;
    return res;
  }
  for (int i = 0; i < m; ++i) {
    const Row& row = p.rows[i];
    for (auto [c, v] : row.coeffs) e.cols[c].emplace_back(i, v);
    e.b[i] = row.rhs;
    const int s = ns + i;
    e.cols[s].emplace_back(i, 1.0);
    switch (row.sense) {
      case RowSense::le: e.lb[s] = 0.0; e.ub[s] = kInf; break;
      case RowSense::eq: e.lb[s] = 0.0; e.ub[s] = 0.0; break;
      case RowSense::ge: e.lb[s] = -kInf; e.ub[s] = 0.0; break;
    }
  }

  // start: structurals at the bound closest to zero, slacks basic at the
  // clamped residual, artificials wherever the clamp was not exact
  e.n = ns + m;
  e.x.assign(e.n, 0.0);
  e.vstat.assign(e.n, kFreeNb);
  for (int j = 0; j < ns; ++j) {
    if (e.lb[j] > -kInf && (e.ub[j] == kInf || std::abs(e.lb[j]) <= std::abs(e.ub[j]))) {
      e.x[j] = e.lb[j];
      e.vstat[j] = kAtLower;
    } else if (e.ub[j] < kInf) {
      e.x[j] = e.ub[j];
      e.vstat[j] = kAtUpper;
    }
  }
  std::vector<double> resid(m);
  for (int i = 0; i < m; ++i) resid[i] = e.b[i];
  for (int j = 0; j < ns; ++j) {
    if (e.x[j] == 0.0) continue;
    for (auto [row, v] : e.cols[j]) resid[row] -= v * e.x[j];
  }
  e.basic_of_row.resize(m);
  int n_art = 0;
  for (int i = 0; i < m; ++i) {
    const int s = ns + i;
    const double clamped = std::clamp(resid[i], e.lb[s], e.ub[s]);
    if (std::abs(resid[i] - clamped) <= 1e-12) {
      e.x[s] = resid[i];
      e.vstat[s] = kBasic;
      e.basic_of_row[i] = s;
    } else {
      e.x[s] = clamped;
      e.vstat[s] = clamped == e.lb[s] ? kAtLower : kAtUpper;
      const double gap = resid[i] - clamped;
      const int a = e.n + n_art++;
      e.cols.push_back({{i, gap > 0 ? 1.0 : -1.0}});
      e.lb.push_back(0.0);
      e.ub.push_back(kInf);
      e.x.push_back(std::abs(gap));
      e.vstat.push_back(kBasic);
      e.basic_of_row[i] = a;
    }
  }
  e.n += n_art;
  e.devex.assign(e.n, 1.0);
  e.cost.assign(e.n, 0.0);

  if (!e.refactor()) {
    res.status = LpStatus::numerical_failure;
    return res;
  }

  if (n_art > 0) {
    for (int j = e.n - n_art; j < e.n; ++j) e.cost[j] = 1.0;
    const LpStatus st = e.run_phase();
    res.phase1_iterations = e.iters;
    if (st != LpStatus::optimal) {
      res.status = st == LpStatus::unbounded ? LpStatus::numerical_failure : st;
      res.iterations = e.iters;
      return res;
    }
    double infeas = 0.0;
    for (int j = e.n - n_art; j < e.n; ++j) infeas += e.x[j];
    double bmax = 1.0;
    for (int i = 0; i < m; ++i) bmax = std::max(bmax, std::abs(e.b[i]));
    if (infeas > opts.feas_tol * bmax * 10.0) {
      res.status = LpStatus::infeasible;
      res.iterations = e.iters;
      return res;
    }
    for (int j = e.n - n_art; j < e.n; ++j) {
      e.ub[j] = 0.0;
      if (e.vstat[j] != kBasic) e.x[j] = 0.0;
    }
  }

  for (int j = 0; j < ns; ++j) e.cost[j] = p.objective[j];
  for (int j = ns; j < e.n; ++j) e.cost[j] = 0.0;
  const LpStatus st = e.run_phase();
  res.iterations = e.iters;
  if (st != LpStatus::optimal) {
    res.status = st;
    return res;
  }

  if (!e.refactor()) {
    res.status = LpStatus::numerical_failure;
    return res;
  }
  e.recompute_basics();

  res.status = LpStatus::optimal;
  res.x.assign(e.x.begin(), e.x.begin() + ns);
  res.objective = p.objective_value(res.x);
  e.y_.resize(m);
  for (int r = 0; r < m; ++r) e.y_[r] = e.cost[e.basic_of_row[r]];
  e.btran(e.y_);
  res.duals.assign(e.y_.data(), e.y_.data() + m);
  res.reduced_costs.resize(ns);
  for (int j = 0; j < ns; ++j)
    res.reduced_costs[j] = p.objective[j] - e.column_dot(j, e.y_);
  return res;
}

}  // namespace mecgrid
