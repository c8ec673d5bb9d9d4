#pragma once

// Non-signalling-assisted one-shot error as an exact linear program, the
// meta-converse saddle value computed on the hypothesis-testing side, and the
// finite-blocklength sandwich that converges to the channel umlaut
// information. The LP and the saddle evaluation are independent routes to the
// same number.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "umlaut/detail/simplex_lp.hpp"
#include "umlaut/divergences.hpp"
#include "umlaut/prob.hpp"
#include "umlaut/umlaut_channel.hpp"

namespace umlaut {

/// Optimal non-signalling code variables for message count M.
struct NsLpResult {
  int message_count = 0;
  double eps_ns = 0.0;                 // minimum average error probability
  std::vector<std::vector<double>> r;  // R[x][y], 0 <= R[x][y] <= P(x)
  Dist p;                              // input distribution of the optimal code
  bool optimal = false;
};

/// One-shot non-signalling error via the linear program
///   max sum_{x,y} W(y|x) R_{xy}
///   s.t. sum_x R_{xy} <= 1/M, 0 <= R_{xy} <= P(x), P a distribution.
/// Always feasible (R = 0, P uniform); solved by dense primal simplex with
/// Bland's rule.
inline NsLpResult ns_error_lp(int message_count, const Channel& w) {
  if (message_count < 1) throw ProbError("ns_error_lp: M must be >= 1");
  const std::size_t n = w.nx(), m = w.ny();
  const std::size_t nr = n * m;
  const std::size_t nvars = nr + n;  // R entries then P entries

  std::vector<double> c(nvars, 0.0);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < m; ++y) c[x * m + y] = w(y, x);

  std::vector<std::vector<double>> rows;
  std::vector<detail::Rel> rels;
  std::vector<double> rhs;
  for (std::size_t y = 0; y < m; ++y) {  // column caps
    std::vector<double> row(nvars, 0.0);
    for (std::size_t x = 0; x < n; ++x) row[x * m + y] = 1.0;
    rows.push_back(std::move(row));
    rels.push_back(detail::Rel::kLe);
    rhs.push_back(1.0 / message_count);
  }
  for (std::size_t x = 0; x < n; ++x) {  // R_{xy} <= P(x)
    for (std::size_t y = 0; y < m; ++y) {
      std::vector<double> row(nvars, 0.0);
      row[x * m + y] = 1.0;
      row[nr + x] = -1.0;
      rows.push_back(std::move(row));
      rels.push_back(detail::Rel::kLe);
      rhs.push_back(0.0);
    }
  }
  {
    std::vector<double> row(nvars, 0.0);
    for (std::size_t x = 0; x < n; ++x) row[nr + x] = 1.0;
    rows.push_back(std::move(row));
    rels.push_back(detail::Rel::kEq);
    rhs.push_back(1.0);
  }

  detail::LpResult lp = detail::solve_lp_max(c, rows, rels, rhs);

  NsLpResult res;
  res.message_count = message_count;
  res.optimal = lp.status == detail::LpResult::Status::kOptimal;
  if (!res.optimal) {  // cannot happen: R = 0 with uniform P is feasible
    res.eps_ns = 1.0;
    res.p = uniform_dist(w.x_alphabet());
    res.r.assign(n, std::vector<double>(m, 0.0));
    return res;
  }
  res.eps_ns = std::clamp(1.0 - lp.objective, 0.0, 1.0);
  res.r.assign(n, std::vector<double>(m, 0.0));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < m; ++y) res.r[x][y] = std::max(0.0, lp.x[x * m + y]);
  std::vector<double> p(n);
  double s = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    p[x] = std::max(0.0, lp.x[nr + x]);  // simplex roundoff can dip below zero
    s += p[x];
  }
  for (std::size_t x = 0; x < n; ++x) p[x] /= s;
  res.p = Dist(w.x_alphabet(), std::move(p));
  return res;
}

namespace detail {

// Exact inner optimum of the meta-converse saddle for fixed P:
//   beta*(P) = max_{u >= 0} (1-eps) sum_y u_y - sum_{x,y} P(x) (u_y - W(y|x))_+
// separates over y; the optimal u_y is the (1-eps)-quantile of {W(y|x)} under
// P. Returns the value and an affine minorant (value = aff0 + grad . P).
struct BetaCut {
  double value;
  double aff0;
  std::vector<double> grad;
};

inline BetaCut beta_star_cut(double eps, const Channel& w, std::span<const double> p) {
  const std::size_t n = w.nx(), m = w.ny();
  BetaCut cut;
  cut.grad.assign(n, 0.0);
  cut.aff0 = 0.0;
  const double target = 1.0 - eps;
  std::vector<std::pair<double, double>> knots(n);  // (W(y|x), P(x))
  for (std::size_t y = 0; y < m; ++y) {
    for (std::size_t x = 0; x < n; ++x) knots[x] = {w(y, x), p[x]};
    std::sort(knots.begin(), knots.end());
    double cum = 0.0;
    double ustar = knots.back().first;
    for (const auto& [wy, px] : knots) {
      cum += px;
      if (cum >= target - 1e-15) {
        ustar = wy;
        break;
      }
    }
    cut.aff0 += target * ustar;
    for (std::size_t x = 0; x < n; ++x) cut.grad[x] -= std::max(0.0, ustar - w(y, x));
  }
  cut.value = cut.aff0;
  for (std::size_t x = 0; x < n; ++x) cut.value += cut.grad[x] * p[x];
  return cut;
}

}  // namespace detail

/// Meta-converse saddle value  max_P min_Q D_H^{1/M}(P x Q || P_XY)  for the
/// joint induced by W. The inner minimum is evaluated exactly through the
/// Neyman-Pearson quantile form; the outer concave maximisation becomes a
/// convex piecewise-linear minimisation of beta*(P), solved by cutting planes
/// with the master LP. Returns +inf when a zero-error code of size M exists.
inline double metaconverse_saddle(int message_count, const Channel& w,
                                  double tol = 1e-8) {
  if (message_count < 2) throw ProbError("metaconverse_saddle: M must be >= 2");
  const double eps = 1.0 / message_count;
  const std::size_t n = w.nx();

  std::vector<detail::BetaCut> cuts;
  std::vector<double> p(n, 1.0 / n);
  double best_beta = std::numeric_limits<double>::infinity();

  for (int it = 0; it < 600; ++it) {
    detail::BetaCut cut = detail::beta_star_cut(eps, w, p);
    best_beta = std::min(best_beta, cut.value);
    if (best_beta <= 1e-300) return std::numeric_limits<double>::infinity();
    cuts.push_back(std::move(cut));

    // Master LP: min t s.t. t >= aff0_i + grad_i . P over the simplex,
    // phrased as max -t with rows grad_i . P - t <= -aff0_i.
    const std::size_t nv = n + 1;  // P entries then t
    std::vector<double> c(nv, 0.0);
    c[n] = -1.0;
    std::vector<std::vector<double>> rows;
    std::vector<detail::Rel> rels;
    std::vector<double> rhs;
    for (const auto& k : cuts) {
      std::vector<double> row(nv, 0.0);
      for (std::size_t x = 0; x < n; ++x) row[x] = k.grad[x];
      row[n] = -1.0;
      rows.push_back(std::move(row));
      rels.push_back(detail::Rel::kLe);
      rhs.push_back(-k.aff0);
    }
    std::vector<double> srow(nv, 0.0);
    for (std::size_t x = 0; x < n; ++x) srow[x] = 1.0;
    rows.push_back(std::move(srow));
    rels.push_back(detail::Rel::kEq);
    rhs.push_back(1.0);

    detail::LpResult lp = detail::solve_lp_max(c, rows, rels, rhs);
    if (lp.status != detail::LpResult::Status::kOptimal)
      throw NoConvergence("metaconverse_saddle: master LP failed");
    double lower_beta = std::max(0.0, -lp.objective);

    // Relative gap on the -log scale.
    if (best_beta - lower_beta <= tol * std::max(best_beta, 1e-30) ||
        best_beta - lower_beta <= 1e-15)
      return -std::log(best_beta);

    double s = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      p[x] = std::max(0.0, lp.x[x]);
      s += p[x];
    }
    for (std::size_t x = 0; x < n; ++x) p[x] /= s;
  }
  throw NoConvergence("metaconverse_saddle: cutting planes did not close the gap");
}

/// Single-letter bounds on -(1/n) log eps^NS(M, W^{x n}) from the Renyi
/// sandwich on D_H, using the certified sides of U_alpha(W):
///   lower(n) = U_lo(W) + (a_lo / ((1-a_lo) n)) log(1/M)
///   upper(n) = U_hi(W) + (a_hi / ((a_hi-1) n)) log(M/(M-1)).
/// Both tend to U(W) as n -> inf and alpha -> 1.
inline std::pair<double, double> ns_sandwich(int message_count, int n, const Channel& w,
                                             double alpha_lo, double alpha_hi,
                                             double tol = 1e-8,
                                             std::uint64_t seed = kDefaultSeed) {
  if (message_count < 2) throw ProbError("ns_sandwich: M must be >= 2");
  if (n < 1) throw ProbError("ns_sandwich: n must be >= 1");
  if (!(alpha_lo > 0.0 && alpha_lo < 1.0)) throw BadAlpha("ns_sandwich: alpha_lo not in (0,1)");
  if (!(alpha_hi > 1.0)) throw BadAlpha("ns_sandwich: alpha_hi not > 1");

  CertifiedValue ulo = channel_renyi_umlaut(alpha_lo, w, tol, seed);
  CertifiedValue uhi = channel_renyi_umlaut(alpha_hi, w, tol, seed);
  const double mm = static_cast<double>(message_count);
  double lower = ulo.lower + alpha_lo / ((1.0 - alpha_lo) * n) * std::log(1.0 / mm);
  double upper = uhi.is_infinite()
                     ? std::numeric_limits<double>::infinity()
                     : uhi.upper + alpha_hi / ((alpha_hi - 1.0) * n) * std::log(mm / (mm - 1.0));
  return {lower, upper};
}

}  // namespace umlaut
