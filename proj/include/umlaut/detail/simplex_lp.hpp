#pragma once

// Dense two-phase primal simplex with Bland's rule. Deterministic and
// self-contained; sized for the few-thousand-variable programs that show up
// in one-shot coding bounds.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace umlaut::detail {

enum class Rel { kLe, kEq, kGe };

struct LpResult {
  enum class Status { kOptimal, kInfeasible, kUnbounded } status;
  double objective = 0.0;       // of the original maximisation
  std::vector<double> x;
};

/// Maximise c^T x subject to rows[i] . x (<=,==,>=) b[i], x >= 0.
inline LpResult solve_lp_max(const std::vector<double>& c,
                             const std::vector<std::vector<double>>& rows,
                             const std::vector<Rel>& rels, const std::vector<double>& b) {
  constexpr double kTol = 1e-9;
  const std::size_t m = rows.size();
  const std::size_t n = c.size();

  // Standard form: append slack/surplus, then artificials so each row owns a
  // basic column. Right-hand sides are made nonnegative first.
  std::vector<std::vector<double>> a(m, std::vector<double>());
  std::vector<double> rhs(m);
  std::vector<Rel> rel(m);
  for (std::size_t i = 0; i < m; ++i) {
    a[i] = rows[i];
    rhs[i] = b[i];
    rel[i] = rels[i];
    if (rhs[i] < 0.0) {
      for (double& v : a[i]) v = -v;
      rhs[i] = -rhs[i];
      rel[i] = rel[i] == Rel::kLe ? Rel::kGe : (rel[i] == Rel::kGe ? Rel::kLe : Rel::kEq);
    }
  }

  std::size_t n_slack = 0;
  for (auto r : rel)
    if (r != Rel::kEq) ++n_slack;
  std::size_t total = n + n_slack + m;  // artificials for every row keep phase 1 uniform

  // Tableau T: m rows of `total` structural columns plus rhs.
  std::vector<std::vector<double>> t(m, std::vector<double>(total + 1, 0.0));
  std::vector<std::size_t> basis(m);
  std::size_t slack_at = n;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
    if (rel[i] == Rel::kLe) t[i][slack_at++] = 1.0;
    else if (rel[i] == Rel::kGe) t[i][slack_at++] = -1.0;
    t[i][n + n_slack + i] = 1.0;  // artificial
    t[i][total] = rhs[i];
    basis[i] = n + n_slack + i;
  }

  auto pivot = [&](std::size_t pr, std::size_t pc) {
    double pv = t[pr][pc];
    for (double& v : t[pr]) v /= pv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == pr) continue;
      double f = t[i][pc];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= total; ++j) t[i][j] -= f * t[pr][j];
    }
    basis[pr] = pc;
  };

  // Bland: entering = lowest-index improving column; leaving = min ratio with
  // lowest basis index on ties.
  auto run = [&](const std::vector<double>& cost, std::size_t ncols) -> bool {
    while (true) {
      std::vector<double> dual(m);
      for (std::size_t i = 0; i < m; ++i) dual[i] = cost[basis[i]];
      std::size_t enter = total + 1;
      for (std::size_t j = 0; j < ncols; ++j) {
        double red = cost[j];
        for (std::size_t i = 0; i < m; ++i) red -= dual[i] * t[i][j];
        if (red > kTol) {  // improving column for a maximisation
          enter = j;
          break;
        }
      }
      if (enter > total) return true;  // optimal
      std::size_t leave = m;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        if (t[i][enter] > kTol) {
          double ratio = t[i][total] / t[i][enter];
          if (ratio < best_ratio - kTol ||
              (ratio < best_ratio + kTol && (leave == m || basis[i] < basis[leave]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave == m) return false;  // unbounded
      pivot(leave, enter);
    }
  };

  // Phase 1: minimise the artificial mass (as a maximisation of its negative).
  std::vector<double> phase1(total + 1, 0.0);
  for (std::size_t j = n + n_slack; j < total; ++j) phase1[j] = -1.0;
  run(phase1, total);
  double art = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] >= n + n_slack) art += t[i][total];
  if (art > 1e-7) return {LpResult::Status::kInfeasible, 0.0, {}};

  // Pivot residual artificials out of the basis where a structural column is
  // available; rows that stay artificial are redundant at level zero.
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n + n_slack) continue;
    for (std::size_t j = 0; j < n + n_slack; ++j) {
      if (std::abs(t[i][j]) > kTol) {
        pivot(i, j);
        break;
      }
    }
  }

  // Phase 2 on the original objective. Entering candidates are restricted to
  // structural and slack columns, so residual artificials stay parked at zero.
  std::vector<double> phase2(total + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) phase2[j] = c[j];
  if (!run(phase2, n + n_slack)) return {LpResult::Status::kUnbounded, 0.0, {}};

  LpResult res;
  res.status = LpResult::Status::kOptimal;
  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) res.x[basis[i]] = t[i][total];
  res.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
  return res;
}

}  // namespace umlaut::detail
