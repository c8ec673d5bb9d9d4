#pragma once

// Channel umlaut information via convex minimisation over input distributions
// with a minimax duality-gap certificate, the Renyi channel variant, and the
// sphere-packing bound with its zero-rate limit.
//
// Primal side: U(W) = -log min_P sum_y prod_x W(y|x)^{P(x)}  (0^0 = 1, and an
// output column is dropped once a supported input excludes it).
// Dual side:   U(W) = min_Q max_x D(Q || W(.|x)).
// Any input distribution certifies a lower bound, any output distribution an
// upper bound; the solver reports both and their gap.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "umlaut/detail/solvers.hpp"
#include "umlaut/divergences.hpp"
#include "umlaut/prob.hpp"

namespace umlaut {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoConvergence : SolverError {
  using SolverError::SolverError;
};

enum class SolveStatus { kOptimal, kInfinite, kNoConvergence };

/// A computed optimum with two-sided certificates and the optimisers that
/// achieved them. lower <= optimum <= upper always holds; gap = upper - lower.
struct CertifiedValue {
  double lower = 0.0;
  double upper = 0.0;
  double value = 0.0;
  double gap = 0.0;
  Dist argmax_p;
  Dist argmin_q;
  SolveStatus status = SolveStatus::kOptimal;

  bool is_infinite() const { return status == SolveStatus::kInfinite; }
};

/// True iff some output symbol has positive probability under every input.
inline bool is_umlaut_finite(const Channel& w) {
  for (std::size_t y = 0; y < w.ny(); ++y) {
    bool all_positive = true;
    for (std::size_t x = 0; x < w.nx() && all_positive; ++x)
      if (w(y, x) <= 0.0) all_positive = false;
    if (all_positive) return true;
  }
  return false;
}

namespace detail {

inline CertifiedValue infinite_certified(const Channel& w) {
  CertifiedValue r;
  r.lower = r.upper = r.value = std::numeric_limits<double>::infinity();
  r.gap = 0.0;
  r.argmax_p = uniform_dist(w.x_alphabet());
  r.argmin_q = uniform_dist(w.y_alphabet());
  r.status = SolveStatus::kInfinite;
  return r;
}

inline std::vector<std::size_t> support_of(std::span<const double> p) {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > kSupportEps) s.push_back(i);
  return s;
}

// Output columns positive against every input in `supp`.
inline std::vector<std::size_t> admissible_columns(const Channel& w,
                                                   const std::vector<std::size_t>& supp) {
  std::vector<std::size_t> cols;
  for (std::size_t y = 0; y < w.ny(); ++y) {
    bool ok = true;
    for (std::size_t x : supp)
      if (w(y, x) <= 0.0) {
        ok = false;
        break;
      }
    if (ok) cols.push_back(y);
  }
  return cols;
}

inline double max_divergence_to_rows(const Channel& w, std::span<const double> q) {
  double worst = 0.0;
  for (std::size_t x = 0; x < w.nx(); ++x) {
    ExtReal d = kl(q, w.row(x));
    if (d.is_infinite()) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, d.as_double());
  }
  return worst;
}

inline double max_renyi_to_rows(double alpha, const Channel& w, std::span<const double> q) {
  double worst = 0.0;
  for (std::size_t x = 0; x < w.nx(); ++x) {
    ExtReal d = renyi(alpha, q, w.row(x));
    if (d.is_infinite()) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, d.as_double());
  }
  return worst;
}

// One mirror-descent run for the channel objective, KL case. Minimises
// psi(P) = log sum_{y adm} exp(sum_x P(x) log W(y|x)) on the face spanned by
// the start's support; tracks the best primal/dual certificates seen.
struct SaddleTracker {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  std::vector<double> best_p, best_q;

  void offer_lower(double v, std::span<const double> p) {
    if (v > lower) {
      lower = v;
      best_p.assign(p.begin(), p.end());
    }
  }
  void offer_upper(double v, std::span<const double> q) {
    if (v < upper) {
      upper = v;
      best_q.assign(q.begin(), q.end());
    }
  }
  double gap() const { return upper - lower; }
};

inline void channel_kl_descent(const Channel& w, std::vector<double> p, int max_iters,
                               double tol, SaddleTracker& track,
                               int fixed_step_iters = 0) {
  auto supp = support_of(p);
  auto cols = admissible_columns(w, supp);
  if (cols.empty()) return;  // this face has divergent umlaut information

  std::size_t ny = cols.size();
  std::vector<double> s(ny), q(w.ny(), 0.0), grad(p.size(), 0.0);

  auto evaluate = [&](std::span<const double> pp) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < ny; ++k) {
      double acc = 0.0;
      for (std::size_t x : supp) acc += pp[x] * std::log(w(cols[k], x));
      s[k] = acc;
      m = std::max(m, acc);
    }
    double z = 0.0;
    for (std::size_t k = 0; k < ny; ++k) z += std::exp(s[k] - m);
    return m + std::log(z);  // psi
  };

  double psi = evaluate(p);
  double eta = 1.0;
  std::vector<double> cand(p.size());
  for (int it = 0; it < max_iters; ++it) {
    // Softmax weights over admissible columns = umlaut marginal of joint(P).
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t k = 0; k < ny; ++k) q[cols[k]] = std::exp(s[k] - psi);
    track.offer_lower(-psi, p);
    track.offer_upper(max_divergence_to_rows(w, q), q);
    if (track.gap() <= tol) return;

    for (std::size_t x : supp) {
      double g = 0.0;
      for (std::size_t k = 0; k < ny; ++k) g += q[cols[k]] * std::log(w(cols[k], x));
      grad[x] = g;  // d psi / d P(x)
    }
    double gbar = 0.0;
    for (std::size_t x : supp) gbar += p[x] * grad[x];

    // Armijo backtracking with a sufficient-decrease rule; accepting any
    // decrease lets overshooting steps oscillate around the optimum.
    bool improved = false;
    double try_eta = eta * 2.0;
    for (int bt = 0; bt < 60 && !improved; ++bt, try_eta *= 0.5) {
      double z = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) cand[i] = 0.0;
      for (std::size_t x : supp) {
        cand[x] = p[x] * std::exp(-try_eta * (grad[x] - gbar));
        z += cand[x];
      }
      if (!(z > 0.0) || !std::isfinite(z)) continue;
      for (std::size_t x : supp) cand[x] /= z;
      double predicted = 0.0;
      for (std::size_t x : supp) predicted += grad[x] * (p[x] - cand[x]);
      double psi_c = evaluate(cand);
      if (psi_c <= psi - 0.25 * predicted && psi_c < psi) {
        p = cand;
        psi = psi_c;
        eta = try_eta;
        improved = true;
      }
    }
    if (!improved) break;  // stationary at line-search resolution
  }
  // Optional equalizer pass: fixed-step multiplicative updates, no
  // monotonicity requirement. Every iterate contributes valid certificates,
  // and the equalisation residual (hence the dual gap) keeps contracting
  // after the line search has hit its floating-point floor.
  for (int it = 0; it < fixed_step_iters && track.gap() > tol; ++it) {
    psi = evaluate(p);
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t k = 0; k < ny; ++k) q[cols[k]] = std::exp(s[k] - psi);
    track.offer_lower(-psi, p);
    track.offer_upper(max_divergence_to_rows(w, q), q);
    double gbar = 0.0;
    for (std::size_t x : supp) {
      double g = 0.0;
      for (std::size_t k = 0; k < ny; ++k) g += q[cols[k]] * std::log(w(cols[k], x));
      grad[x] = g;
      gbar += p[x] * g;
    }
    double z = 0.0;
    for (std::size_t x : supp) {
      p[x] *= std::exp(-0.5 * (grad[x] - gbar));
      z += p[x];
    }
    for (std::size_t x : supp) p[x] /= z;
  }
  // Final certificates at the last iterate.
  psi = evaluate(p);
  std::fill(q.begin(), q.end(), 0.0);
  for (std::size_t k = 0; k < ny; ++k) q[cols[k]] = std::exp(s[k] - psi);
  track.offer_lower(-psi, p);
  track.offer_upper(max_divergence_to_rows(w, q), q);
}

// Face candidate from a near-converged interior iterate: coordinates still
// above the threshold keep their (renormalised) mass, the rest are cut to
// exact zero. Recovers boundary optima for alphabets too large for full face
// enumeration.
inline std::vector<double> truncated_support_start(const std::vector<double>& p,
                                                   double threshold = 1e-6) {
  std::vector<double> q(p.size(), 0.0);
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > threshold) s += (q[i] = p[i]);
  if (s <= 0.0) return p;
  for (double& v : q) v /= s;
  return q;
}

// Projected-subgradient polish of the dual certificate: minimises
// F(Q) = max_x D(Q||W(.|x)) (or its Renyi version) from the best Q seen.
// Polyak steps with the level-adjustment scheme for an unknown optimum: the
// target sits delta below the incumbent, and delta halves whenever progress
// stalls. Works on the support of the incoming point; zeros stay zero.
inline void polish_upper(const Channel& w, double alpha /* 0 = KL */, double tol,
                         int max_iters, SaddleTracker& track) {
  if (track.best_q.empty()) return;
  std::vector<double> q = track.best_q;
  std::vector<std::size_t> supp = support_of(q);
  std::vector<double> sub(supp.size());
  double delta = std::max(tol, 0.5 * track.gap());
  int stall = 0;
  for (int it = 0; it < max_iters; ++it) {
    double worst = -1.0;
    std::size_t worst_x = 0;
    for (std::size_t x = 0; x < w.nx(); ++x) {
      ExtReal d = alpha == 0.0 ? kl(std::span<const double>(q), w.row(x))
                               : renyi(alpha, std::span<const double>(q), w.row(x));
      if (d.is_infinite()) return;  // wrong support class; polish cannot help
      if (d.as_double() > worst) {
        worst = d.as_double();
        worst_x = x;
      }
    }
    double before = track.upper;
    track.offer_upper(worst, q);
    if (track.gap() <= tol) return;
    if (track.upper < before - 1e-16) {
      stall = 0;
    } else if (++stall >= 100) {
      stall = 0;
      delta *= 0.5;
      if (delta < tol * 0.0625) return;
    }

    double norm2 = 0.0;
    for (std::size_t i = 0; i < supp.size(); ++i) {
      std::size_t y = supp[i];
      if (q[y] <= 1e-14) {
        sub[i] = 0.0;
        continue;
      }
      double wy = w(worst_x, y);
      if (alpha == 0.0) {
        sub[i] = std::log(q[y] / wy) + 1.0;
      } else {
        // d/dq_y of (1/(a-1)) log sum q^a w^{1-a}
        double logs = (alpha - 1.0) * worst;
        sub[i] = alpha / (alpha - 1.0) *
                 std::exp((alpha - 1.0) * std::log(q[y]) + (1.0 - alpha) * std::log(wy) -
                          logs);
      }
      norm2 += sub[i] * sub[i];
    }
    if (norm2 <= 0.0) return;
    double target = std::max(track.lower, track.upper - delta);
    double step = (worst - target) / norm2;
    if (!(step > 0.0)) step = delta / norm2;
    std::vector<double> qs(supp.size());
    for (std::size_t i = 0; i < supp.size(); ++i) qs[i] = q[supp[i]] - step * sub[i];
    project_to_simplex(qs);
    for (std::size_t i = 0; i < supp.size(); ++i) q[supp[i]] = qs[i];
  }
}

}  // namespace detail

/// Channel umlaut information with a duality-gap certificate.
/// Entropic mirror descent with Armijo backtracking, restarted from the
/// uniform point, every face barycenter (|X| <= 6) and 8 Dirichlet(1) draws.
inline CertifiedValue channel_umlaut(const Channel& w, double tol = 1e-8,
                                     std::uint64_t seed = kDefaultSeed) {
  if (!is_umlaut_finite(w)) return detail::infinite_certified(w);

  constexpr int kIterationCap = 100000;
  auto starts = detail::simplex_restarts(w.nx(), seed);
  const int per_restart = std::max(2000, kIterationCap / static_cast<int>(starts.size()));

  detail::SaddleTracker track;
  for (const auto& start : starts) {
    detail::channel_kl_descent(w, start, per_restart, tol, track);
    if (track.gap() <= tol) break;
  }
  if (track.gap() > tol && !track.best_p.empty()) {
    // Spend the remaining budget refining from the best primal point, retry
    // on its face in case the optimum has boundary support, then polish the
    // dual certificate directly.
    detail::channel_kl_descent(w, track.best_p, kIterationCap, tol, track, 3000);
    if (track.gap() > tol)
      detail::channel_kl_descent(w, detail::truncated_support_start(track.best_p),
                                 kIterationCap, tol, track, 3000);
    detail::polish_upper(w, 0.0, tol, 20000, track);
  }

  CertifiedValue r;
  r.lower = track.lower;
  r.upper = track.upper;
  r.value = 0.5 * (track.lower + track.upper);
  r.gap = track.gap();
  r.argmax_p = Dist(w.x_alphabet(), track.best_p);
  r.argmin_q = Dist(w.y_alphabet(), track.best_q);
  r.status = r.gap <= tol ? SolveStatus::kOptimal : SolveStatus::kNoConvergence;
  return r;
}

namespace detail {

// Renyi case: minimises psi_a(P) = log Z_a(P), with
//   Z_a(P) = sum_y ( sum_x P(x) W(y|x)^{1-a} )^{1/(1-a)}
// evaluated in the log domain. For a > 1 the sum runs over the columns
// positive against the face's support; for a < 1 vanishing entries simply
// drop out of the inner sum.
inline void channel_renyi_descent(double alpha, const Channel& w, std::vector<double> p,
                                  int max_iters, double tol, SaddleTracker& track,
                                  int fixed_step_iters = 0) {
  auto supp = support_of(p);
  std::vector<std::size_t> cols;
  if (alpha > 1.0) {
    cols = admissible_columns(w, supp);
    if (cols.empty()) return;
  } else {
    for (std::size_t y = 0; y < w.ny(); ++y) {
      bool any = false;
      for (std::size_t x : supp)
        if (w(y, x) > 0.0) any = true;
      if (any) cols.push_back(y);
    }
  }

  const double inv1a = 1.0 / (1.0 - alpha);
  std::size_t ny = cols.size();
  std::vector<double> logg(ny), t(ny), q(w.ny(), 0.0), grad(p.size(), 0.0);

  auto evaluate = [&](std::span<const double> pp) {
    for (std::size_t k = 0; k < ny; ++k) {
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t x : supp) {
        double wyx = w(cols[k], x);
        if (wyx <= 0.0 || pp[x] <= 0.0) continue;
        m = std::max(m, std::log(pp[x]) + (1.0 - alpha) * std::log(wyx));
      }
      double acc = 0.0;
      for (std::size_t x : supp) {
        double wyx = w(cols[k], x);
        if (wyx <= 0.0 || pp[x] <= 0.0) continue;
        acc += std::exp(std::log(pp[x]) + (1.0 - alpha) * std::log(wyx) - m);
      }
      logg[k] = m + std::log(acc);
      t[k] = inv1a * logg[k];
    }
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < ny; ++k) m = std::max(m, t[k]);
    double z = 0.0;
    for (std::size_t k = 0; k < ny; ++k) z += std::exp(t[k] - m);
    return m + std::log(z);  // psi_a
  };

  double psi = evaluate(p);
  double eta = 1.0;
  std::vector<double> cand(p.size());
  for (int it = 0; it < max_iters; ++it) {
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t k = 0; k < ny; ++k) q[cols[k]] = std::exp(t[k] - psi);
    track.offer_lower(-psi, p);
    track.offer_upper(max_renyi_to_rows(alpha, w, q), q);
    if (track.gap() <= tol) return;

    // d psi / d P(x) = inv1a * sum_y c_y exp((1-a) log W(y|x) - logg_y),
    // with c_y the softmax weights over columns.
    for (std::size_t x : supp) {
      double g = 0.0;
      for (std::size_t k = 0; k < ny; ++k) {
        double wyx = w(cols[k], x);
        if (wyx <= 0.0) continue;
        g += std::exp(t[k] - psi + (1.0 - alpha) * std::log(wyx) - logg[k]);
      }
      grad[x] = inv1a * g;
    }
    double gbar = 0.0;
    for (std::size_t x : supp) gbar += p[x] * grad[x];

    bool improved = false;
    double try_eta = eta * 2.0;
    for (int bt = 0; bt < 60 && !improved; ++bt, try_eta *= 0.5) {
      double z = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) cand[i] = 0.0;
      for (std::size_t x : supp) {
        cand[x] = p[x] * std::exp(-try_eta * (grad[x] - gbar));
        z += cand[x];
      }
      if (!(z > 0.0) || !std::isfinite(z)) continue;
      for (std::size_t x : supp) cand[x] /= z;
      double predicted = 0.0;
      for (std::size_t x : supp) predicted += grad[x] * (p[x] - cand[x]);
      double psi_c = evaluate(cand);
      if (psi_c <= psi - 0.25 * predicted && psi_c < psi) {
        p = cand;
        psi = psi_c;
        eta = try_eta;
        improved = true;
      }
    }
    if (!improved) break;
  }
  // Equalizer pass, as in the KL case.
  for (int it = 0; it < fixed_step_iters && track.gap() > tol; ++it) {
    psi = evaluate(p);
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t k = 0; k < ny; ++k) q[cols[k]] = std::exp(t[k] - psi);
    track.offer_lower(-psi, p);
    track.offer_upper(max_renyi_to_rows(alpha, w, q), q);
    double gbar = 0.0;
    for (std::size_t x : supp) {
      double g = 0.0;
      for (std::size_t k = 0; k < ny; ++k) {
        double wyx = w(cols[k], x);
        if (wyx <= 0.0) continue;
        g += std::exp(t[k] - psi + (1.0 - alpha) * std::log(wyx) - logg[k]);
      }
      grad[x] = inv1a * g;
      gbar += p[x] * grad[x];
    }
    double z = 0.0;
    for (std::size_t x : supp) {
      p[x] *= std::exp(-0.5 * (grad[x] - gbar));
      z += p[x];
    }
    for (std::size_t x : supp) p[x] /= z;
  }
  psi = evaluate(p);
  std::fill(q.begin(), q.end(), 0.0);
  for (std::size_t k = 0; k < ny; ++k) q[cols[k]] = std::exp(t[k] - psi);
  track.offer_lower(-psi, p);
  track.offer_upper(max_renyi_to_rows(alpha, w, q), q);
}

}  // namespace detail

/// Renyi alpha-umlaut information of a channel,
/// U_a(W) = max_P U_a(X;Y) = min_Q max_x D_a(Q || W(.|x)),
/// solved like channel_umlaut on the transformed objective.
inline CertifiedValue channel_renyi_umlaut(double alpha, const Channel& w, double tol = 1e-8,
                                           std::uint64_t seed = kDefaultSeed) {
  if (!(alpha > 0.0) || alpha == 1.0)
    throw BadAlpha("channel_renyi_umlaut: alpha must be in (0,1) or (1,inf)");
  // For alpha > 1 divergence happens exactly when no output column is fully
  // positive; for alpha < 1 the value is always finite.
  if (alpha > 1.0 && !is_umlaut_finite(w)) return detail::infinite_certified(w);

  constexpr int kIterationCap = 100000;
  auto starts = detail::simplex_restarts(w.nx(), seed);
  const int per_restart = std::max(2000, kIterationCap / static_cast<int>(starts.size()));

  detail::SaddleTracker track;
  for (const auto& start : starts) {
    detail::channel_renyi_descent(alpha, w, start, per_restart, tol, track);
    if (track.gap() <= tol) break;
  }
  if (track.gap() > tol && !track.best_p.empty()) {
    detail::channel_renyi_descent(alpha, w, track.best_p, kIterationCap, tol, track, 3000);
    if (track.gap() > tol)
      detail::channel_renyi_descent(alpha, w, detail::truncated_support_start(track.best_p),
                                    kIterationCap, tol, track, 3000);
    detail::polish_upper(w, alpha, tol, 20000, track);
  }

  CertifiedValue r;
  r.lower = track.lower;
  r.upper = track.upper;
  r.value = 0.5 * (track.lower + track.upper);
  r.gap = track.gap();
  r.argmax_p = Dist(w.x_alphabet(), track.best_p);
  r.argmin_q = Dist(w.y_alphabet(), track.best_q);
  r.status = r.gap <= tol ? SolveStatus::kOptimal : SolveStatus::kNoConvergence;
  return r;
}

/// Order-0 endpoint of the sphere-packing supremum, max_P min_Q D_0.
/// D_0(P_X Q_Y || P_XY) = -log P_XY(supp(P_X) x supp(Q_Y)); column masses are
/// additive, so the minimising Q takes supp(Q_Y) = Y and the rectangle
/// supp(P_X) x Y carries all of P_XY's mass. The value is 0 for every input.
inline double channel_order0_umlaut(const Channel&) { return 0.0; }

/// Sphere-packing exponent E_sp(r, W) = sup_{a in (0,1]} U_{1-a}(W) - ((1-a)/a) r.
/// Supremum over an adaptive alpha-grid: coarse scan, local midpoint
/// refinement, and geometric refinement toward a -> 0 (where U_{1-a} -> U(W)).
/// r = 0 returns the zero-rate limit U(W).
inline double sphere_packing(double r, const Channel& w, double tol = 1e-6,
                             std::uint64_t seed = kDefaultSeed) {
  if (r < 0.0) throw ProbError("sphere_packing: r must be >= 0");
  const double sub_tol = std::min(tol * 0.1, 1e-9);

  auto h = [&](double a) -> double {
    if (a >= 1.0) return channel_order0_umlaut(w);
    CertifiedValue u = channel_renyi_umlaut(1.0 - a, w, sub_tol, seed);
    if (u.is_infinite()) return std::numeric_limits<double>::infinity();
    return u.value - (1.0 - a) / a * r;
  };

  double best = -std::numeric_limits<double>::infinity();
  double best_a = 1.0;
  std::vector<double> grid;
  for (int k = 1; k <= 100; ++k) grid.push_back(0.01 * k);
  for (double a : grid) {
    double v = h(a);
    if (v > best) {
      best = v;
      best_a = a;
    }
  }
  if (std::isinf(best)) return best;

  // Geometric march toward the a -> 0 endpoint while it keeps paying off.
  double a_lo = 0.01;
  for (int round = 0; round < 60; ++round) {
    a_lo *= 0.5;
    if (a_lo < 1e-9) break;
    double v = h(a_lo);
    if (v > best) {
      double gain = v - best;
      best = v;
      best_a = a_lo;
      if (gain < tol * 0.25) break;
    } else {
      break;
    }
  }

  // Local midpoint refinement around the incumbent.
  double step = (best_a <= 0.01) ? best_a * 0.5 : 0.005;
  for (int round = 0; round < 60 && step > 1e-12; ++round) {
    double improved = 0.0;
    for (double a : {best_a - step, best_a + step}) {
      if (a <= 0.0 || a > 1.0) continue;
      double v = h(a);
      if (v > best) {
        improved = std::max(improved, v - best);
        best = v;
        best_a = a;
      }
    }
    step *= 0.5;
    if (improved < tol * 0.25 && step < tol) break;
  }
  return best;
}

}  // namespace umlaut
