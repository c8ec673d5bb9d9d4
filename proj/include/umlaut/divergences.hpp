#pragma once

// Relative entropy, Renyi divergence, entropy, the Gibbs variational
// principle, and the exact one-shot hypothesis-testing divergence with its
// Renyi sandwich bounds. All values in nats.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "umlaut/prob.hpp"

namespace umlaut {

inline double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > kSupportEps) h -= v * std::log(v);
  return h;
}

inline double entropy(const Dist& p) { return entropy(std::span<const double>(p.weights())); }

/// D(P||Q) = sum P log(P/Q), +inf when supp(P) is not contained in supp(Q).
inline ExtReal kl(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ShapeMismatch("kl: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= kSupportEps) continue;  // 0 log 0 = 0
    if (q[i] <= kSupportEps) return ExtReal::infinity();
    s += p[i] * std::log(p[i] / q[i]);
  }
  return ExtReal(clamp_divergence(s));
}

inline ExtReal kl(const Dist& p, const Dist& q) {
  return kl(std::span<const double>(p.weights()), std::span<const double>(q.weights()));
}

inline ExtReal kl(const JointDist& p, const JointDist& q) {
  if (p.nx() != q.nx() || p.ny() != q.ny()) throw ShapeMismatch("kl: joint shape mismatch");
  return kl(std::span<const double>(p.mass()), std::span<const double>(q.mass()));
}

/// Renyi alpha-relative entropy (1/(alpha-1)) log sum P^a Q^(1-a),
/// alpha in (0,1) or (1,inf). Log-domain evaluation keeps large alpha stable.
inline ExtReal renyi(double alpha, std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ShapeMismatch("renyi: length mismatch");
  if (!(alpha > 0.0) || alpha == 1.0) throw BadAlpha("renyi: alpha must be in (0,1) or (1,inf)");
  // Collect log(P^a Q^(1-a)) over outcomes contributing a nonzero term.
  std::vector<double> terms;
  terms.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    bool pp = p[i] > kSupportEps, qp = q[i] > kSupportEps;
    if (alpha > 1.0) {
      if (pp && !qp) return ExtReal::infinity();  // support violation
      if (!pp) continue;                          // P^a = 0 kills the term
      terms.push_back(alpha * std::log(p[i]) + (1.0 - alpha) * std::log(q[i]));
    } else {
      if (!pp || !qp) continue;
      terms.push_back(alpha * std::log(p[i]) + (1.0 - alpha) * std::log(q[i]));
    }
  }
  if (terms.empty()) return ExtReal::infinity();  // mutually singular
  double m = *std::max_element(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  double v = (m + std::log(s)) / (alpha - 1.0);
  return ExtReal(clamp_divergence(v));
}

inline ExtReal renyi(double alpha, const Dist& p, const Dist& q) {
  return renyi(alpha, std::span<const double>(p.weights()),
               std::span<const double>(q.weights()));
}

inline ExtReal renyi(double alpha, const JointDist& p, const JointDist& q) {
  if (p.nx() != q.nx() || p.ny() != q.ny())
    throw ShapeMismatch("renyi: joint shape mismatch");
  return renyi(alpha, std::span<const double>(p.mass()), std::span<const double>(q.mass()));
}

// ---------------------------------------------------------------------------
// Gibbs variational principle: -H(P) + E_P[A] >= -log sum_x exp(-A(x)),
// with equality exactly at the Gibbs distribution of A.

inline double gibbs_free_energy(std::span<const double> p, std::span<const double> a) {
  if (p.size() != a.size()) throw ShapeMismatch("gibbs_free_energy: length mismatch");
  double e = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) e += p[i] * a[i];
  return -entropy(p) + e;
}

inline double gibbs_log_partition(std::span<const double> a) {
  double m = -*std::min_element(a.begin(), a.end());  // max of -A
  double s = 0.0;
  for (double v : a) s += std::exp(-v - m);
  return m + std::log(s);
}

inline std::vector<double> gibbs_minimizer(std::span<const double> a) {
  double lz = gibbs_log_partition(a);
  std::vector<double> p(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) p[i] = std::exp(-a[i] - lz);
  return p;
}

// ---------------------------------------------------------------------------
// One-shot hypothesis-testing divergence.

/// Optimal randomised test together with its errors.
/// value = -log(type2); type1 <= eps up to rounding.
struct HypoTestResult {
  ExtReal value;
  std::vector<double> test;  // acceptance probability of the null per outcome
  double type1 = 0.0;
  double type2 = 0.0;
};

/// D_H^eps(P||Q): largest -log E_Q[T] over tests with E_P[T] >= 1-eps.
/// Neyman-Pearson construction: outcomes sorted by likelihood ratio P/Q
/// descending (Q=0, P>0 counts as ratio +inf), equal ratios merged into a
/// single block, boundary block randomised. The optimum is attained exactly.
inline HypoTestResult dh_eps(double eps, std::span<const double> p,
                             std::span<const double> q) {
  if (p.size() != q.size()) throw ShapeMismatch("dh_eps: length mismatch");
  if (!(eps > 0.0 && eps < 1.0)) throw ProbError("dh_eps: eps must be in (0,1)");
  if (p.size() > (1u << 24)) throw TooLarge("dh_eps: more than 2^24 outcomes");

  struct Item {
    double ratio;
    std::size_t idx;
  };
  std::vector<Item> items;
  items.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= kSupportEps && q[i] <= kSupportEps) continue;  // weightless outcome
    double r = (q[i] <= kSupportEps) ? std::numeric_limits<double>::infinity()
                                     : p[i] / q[i];
    items.push_back({r, i});
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.ratio != b.ratio) return a.ratio > b.ratio;
    return a.idx < b.idx;
  });

  HypoTestResult res;
  res.test.assign(p.size(), 0.0);
  const double target = 1.0 - eps;
  double cum_p = 0.0, beta = 0.0;
  std::size_t i = 0;
  while (i < items.size() && cum_p < target) {
    // Merge the block of equal ratios starting at i.
    std::size_t j = i;
    double block_p = 0.0, block_q = 0.0;
    while (j < items.size() && items[j].ratio == items[i].ratio) {
      block_p += p[items[j].idx];
      block_q += q[items[j].idx];
      ++j;
    }
    double t = 1.0;
    if (cum_p + block_p > target) {
      t = block_p > 0.0 ? (target - cum_p) / block_p : 0.0;
      t = std::clamp(t, 0.0, 1.0);
    }
    for (std::size_t k = i; k < j; ++k) res.test[items[k].idx] = t;
    cum_p += t * block_p;
    beta += t * block_q;
    i = j;
  }

  double accepted = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) accepted += p[k] * res.test[k];
  res.type1 = 1.0 - accepted;
  res.type2 = beta;
  res.value = (beta == 0.0) ? ExtReal::infinity() : ExtReal(clamp_divergence(-std::log(beta)));
  return res;
}

inline HypoTestResult dh_eps(double eps, const Dist& p, const Dist& q) {
  return dh_eps(eps, std::span<const double>(p.weights()),
                std::span<const double>(q.weights()));
}

inline HypoTestResult dh_eps(double eps, const JointDist& p, const JointDist& q) {
  if (p.nx() != q.nx() || p.ny() != q.ny())
    throw ShapeMismatch("dh_eps: joint shape mismatch");
  return dh_eps(eps, std::span<const double>(p.mass()), std::span<const double>(q.mass()));
}

/// Renyi sandwich on D_H^eps:
///   lower:  D_a(P||Q) + (a/(a-1)) log(1/eps),            a in (0,1)
///   upper:  min{ (1 + D(P||Q)) / (1-eps),
///                D_a(P||Q) + (a/(a-1)) log(1/(1-eps)) },  a > 1
/// The lower-bound sign follows the standard Chernoff-type argument; note
/// a/(a-1) < 0 for a < 1, so the correction term is nonpositive.
inline std::pair<ExtReal, ExtReal> dh_bounds(double eps, double alpha_lo, double alpha_hi,
                                             std::span<const double> p,
                                             std::span<const double> q) {
  if (!(eps > 0.0 && eps < 1.0)) throw ProbError("dh_bounds: eps must be in (0,1)");
  if (!(alpha_lo > 0.0 && alpha_lo < 1.0)) throw BadAlpha("dh_bounds: alpha_lo not in (0,1)");
  if (!(alpha_hi > 1.0)) throw BadAlpha("dh_bounds: alpha_hi not > 1");

  ExtReal d_lo = renyi(alpha_lo, p, q);
  ExtReal lower = d_lo + ExtReal(alpha_lo / (alpha_lo - 1.0) * std::log(1.0 / eps));

  ExtReal d1 = kl(p, q);
  ExtReal up1 = d1.is_finite() ? ExtReal((1.0 + d1.as_double()) / (1.0 - eps))
                               : ExtReal::infinity();
  ExtReal d_hi = renyi(alpha_hi, p, q);
  ExtReal up2 = d_hi + ExtReal(alpha_hi / (alpha_hi - 1.0) * std::log(1.0 / (1.0 - eps)));
  ExtReal upper = up1 <= up2 ? up1 : up2;
  return {lower, upper};
}

inline std::pair<ExtReal, ExtReal> dh_bounds(double eps, double alpha_lo, double alpha_hi,
                                             const Dist& p, const Dist& q) {
  return dh_bounds(eps, alpha_lo, alpha_hi, std::span<const double>(p.weights()),
                   std::span<const double>(q.weights()));
}

}  // namespace umlaut
