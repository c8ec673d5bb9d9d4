#pragma once

// Unassisted zero-rate exponent, the (k,q) lower umlaut information with
// type-class acceleration, list-decoding exponents with the quantitative gap
// bound, and the doubly-nonnegative relaxation of the pairwise quadratic form.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "umlaut/detail/jacobi.hpp"
#include "umlaut/detail/solvers.hpp"
#include "umlaut/divergences.hpp"
#include "umlaut/umlaut_channel.hpp"

namespace umlaut {

/// Pairwise Bhattacharyya distances A[x][x'] = -log sum_y sqrt(W(y|x) W(y|x')),
/// symmetric, zero diagonal, +inf for rows with disjoint supports.
struct BhattMatrix {
  std::size_t n = 0;
  std::vector<double> a;  // row-major, entries in [0, +inf]

  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
  bool all_finite() const {
    for (double v : a)
      if (std::isinf(v)) return false;
    return true;
  }
};

inline BhattMatrix bhattacharyya_matrix(const Channel& w) {
  BhattMatrix m;
  m.n = w.nx();
  m.a.assign(m.n * m.n, 0.0);
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = i + 1; j < m.n; ++j) {
      double s = 0.0;
      for (std::size_t y = 0; y < w.ny(); ++y) s += std::sqrt(w(y, i) * w(y, j));
      double v = s > 0.0 ? std::max(0.0, -std::log(s))
                         : std::numeric_limits<double>::infinity();
      m.a[i * m.n + j] = v;
      m.a[j * m.n + i] = v;
    }
  }
  return m;
}

/// f(v) = -log sum_y exp(sum_x v(x) log W(y|x)) for v in [0,1]^X, with output
/// columns excluded once a supported x has W(y|x) = 0. Monotone increasing in
/// v and nonnegative whenever ||v||_1 = 1.
inline ExtReal geometric_mixture_exponent(const Channel& w, std::span<const double> v) {
  if (v.size() != w.nx()) throw ShapeMismatch("geometric_mixture_exponent: length mismatch");
  double m = -std::numeric_limits<double>::infinity();
  std::vector<double> s(w.ny(), -std::numeric_limits<double>::infinity());
  for (std::size_t y = 0; y < w.ny(); ++y) {
    double acc = 0.0;
    bool killed = false;
    for (std::size_t x = 0; x < w.nx(); ++x) {
      if (v[x] <= kSupportEps) continue;
      double wyx = w(y, x);
      if (wyx <= 0.0) {
        killed = true;
        break;
      }
      acc += v[x] * std::log(wyx);
    }
    if (!killed) {
      s[y] = acc;
      m = std::max(m, acc);
    }
  }
  if (!std::isfinite(m)) return ExtReal::infinity();
  double z = 0.0;
  for (double sy : s)
    if (std::isfinite(sy)) z += std::exp(sy - m);
  return ExtReal(clamp_divergence(-(m + std::log(z))));
}

/// Mixture weights for the (k,q) lower umlaut information.
struct EllSpec {
  int k;
  std::vector<double> q;

  EllSpec(int k_, std::vector<double> q_) : k(k_), q(std::move(q_)) {
    if (k < 1 || q.size() != static_cast<std::size_t>(k))
      throw ShapeMismatch("EllSpec: q must have length k");
    double s = 0.0;
    for (double v : q) {
      if (v < 0.0) throw NegativeWeight("EllSpec: negative mixture weights unsupported");
      s += v;
    }
    if (std::abs(s - 1.0) > kMassTol) throw NotNormalized("EllSpec: q must sum to 1");
  }

  static EllSpec uniform(int k) {
    return EllSpec(k, std::vector<double>(k, 1.0 / static_cast<double>(k)));
  }

  bool is_uniform() const {
    for (double v : q)
      if (std::abs(v - 1.0 / k) > 1e-15) return false;
    return true;
  }
};

namespace detail {

// Visit every composition (n_1,...,n_d) of k; `counts` is reused storage.
inline void for_each_composition(int k, std::size_t d,
                                 const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> counts(d, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int left) {
    if (pos + 1 == d) {
      counts[pos] = left;
      fn(counts);
      return;
    }
    for (int c = 0; c <= left; ++c) {
      counts[pos] = c;
      rec(pos + 1, left - c);
    }
  };
  rec(0, k);
}

}  // namespace detail

/// ell_{k,q}(W, P): expectation over k-tuples from P of f applied to the
/// q-weighted occupation vector. Uniform q runs over type classes with
/// multinomial weights; general q enumerates the |X|^k tuples directly under
/// the guard k log|X| <= 24 log 2.
inline ExtReal ell_kq(const EllSpec& spec, const Dist& p, const Channel& w) {
  if (!(p.alphabet() == w.x_alphabet()))
    throw AlphabetMismatch("ell_kq: P not over W's input alphabet");
  const std::size_t d = w.nx();
  const int k = spec.k;

  if (spec.is_uniform()) {
    double acc = 0.0;
    bool infinite = false;
    std::vector<double> v(d);
    detail::for_each_composition(k, d, [&](const std::vector<int>& counts) {
      if (infinite) return;
      double logw = std::lgamma(k + 1.0);
      bool zero = false;
      for (std::size_t x = 0; x < d; ++x) {
        logw -= std::lgamma(counts[x] + 1.0);
        if (counts[x] > 0) {
          if (p[x] <= kSupportEps) {
            zero = true;
            break;
          }
          logw += counts[x] * std::log(p[x]);
        }
      }
      if (zero) return;
      for (std::size_t x = 0; x < d; ++x) v[x] = static_cast<double>(counts[x]) / k;
      ExtReal f = geometric_mixture_exponent(w, v);
      if (f.is_infinite()) {
        infinite = true;
        return;
      }
      acc += std::exp(logw) * f.as_double();
    });
    return infinite ? ExtReal::infinity() : ExtReal(acc);
  }

  if (k * std::log(static_cast<double>(d)) > 24.0 * std::log(2.0))
    throw TooLarge("ell_kq: non-uniform q enumeration beyond 2^24 tuples");
  std::vector<std::size_t> tuple(k, 0);
  std::vector<double> v(d);
  double acc = 0.0;
  while (true) {
    double weight = 1.0;
    for (int i = 0; i < k; ++i) weight *= p[tuple[i]];
    if (weight > 0.0) {
      std::fill(v.begin(), v.end(), 0.0);
      for (int i = 0; i < k; ++i) v[tuple[i]] += spec.q[i];
      ExtReal f = geometric_mixture_exponent(w, v);
      if (f.is_infinite()) return ExtReal::infinity();
      acc += weight * f.as_double();
    }
    int pos = k - 1;
    while (pos >= 0 && tuple[pos] + 1 == d) tuple[pos--] = 0;
    if (pos < 0) break;
    ++tuple[pos];
  }
  return ExtReal(acc);
}

/// Doubly-nonnegative upper bound on max_p p^T A p: ADMM over
/// { B psd, B >= 0 entrywise, sum of entries 1 }, alternating the PSD
/// eigenvalue clip with the exact entrywise-simplex projection. Returns +inf
/// when A has an infinite entry. Exact for |X| <= 4.
inline double dnn_bound(const Channel& w, double tol = 1e-8) {
  BhattMatrix a = bhattacharyya_matrix(w);
  if (!a.all_finite()) return std::numeric_limits<double>::infinity();
  const std::size_t d = a.n;
  if (d == 1) return 0.0;

  const double res_tol = std::min(tol, 1e-10);
  double rho = 1.0;
  std::vector<double> b(d * d, 0.0), c(d * d, 1.0 / (d * d)), u(d * d, 0.0);
  std::vector<double> tmp(d * d);
  double primal = 0.0, dual = 0.0;
  int it = 0;
  for (; it < 200000; ++it) {
    for (std::size_t i = 0; i < d * d; ++i) tmp[i] = c[i] - u[i] + a.a[i] / rho;
    b = detail::project_psd(tmp, d);

    std::vector<double> c_prev = c;
    for (std::size_t i = 0; i < d * d; ++i) c[i] = b[i] + u[i];
    detail::project_to_simplex(c);

    primal = dual = 0.0;
    for (std::size_t i = 0; i < d * d; ++i) {
      u[i] += b[i] - c[i];
      primal += (b[i] - c[i]) * (b[i] - c[i]);
      dual += (c[i] - c_prev[i]) * (c[i] - c_prev[i]);
    }
    primal = std::sqrt(primal);
    dual = rho * std::sqrt(dual);
    if (primal < res_tol && dual < res_tol) break;
    if (primal > 10.0 * dual) {
      rho *= 2.0;
      for (double& v : u) v *= 0.5;
    } else if (dual > 10.0 * primal) {
      rho *= 0.5;
      for (double& v : u) v *= 2.0;
    }
  }
  if (primal > 1e-6 || dual > 1e-6)
    throw NoConvergence("dnn_bound: ADMM residuals did not settle");
  double obj = 0.0;
  for (std::size_t i = 0; i < d * d; ++i) obj += a.a[i] * c[i];
  return obj;
}

namespace detail {

// Multistart projected gradient ascent for p^T A p on the simplex.
// 16 Dirichlet(1) starts + vertices + uniform, per the fixed seed.
inline std::pair<double, std::vector<double>> quadratic_form_ascent(const BhattMatrix& a,
                                                                    std::uint64_t seed) {
  const std::size_t d = a.n;
  std::vector<std::vector<double>> starts;
  starts.emplace_back(d, 1.0 / d);
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> p(d, 0.0);
    p[i] = 1.0;
    starts.push_back(std::move(p));
  }
  std::mt19937_64 rng(seed);
  for (int r = 0; r < 16; ++r) starts.push_back(dirichlet1(rng, d));

  auto value = [&](std::span<const double> p) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) s += p[i] * a(i, j) * p[j];
    return s;
  };

  double best = -1.0;
  std::vector<double> best_p;
  for (auto p : starts) {
    double fp = value(p);
    double eta = 1.0;
    for (int it = 0; it < 5000; ++it) {
      std::vector<double> g(d, 0.0);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) g[i] += 2.0 * a(i, j) * p[j];
      bool improved = false;
      double try_eta = eta * 2.0;
      for (int bt = 0; bt < 50 && !improved; ++bt, try_eta *= 0.5) {
        std::vector<double> cand(d);
        for (std::size_t i = 0; i < d; ++i) cand[i] = p[i] + try_eta * g[i];
        project_to_simplex(cand);
        double fc = value(cand);
        if (fc > fp + 1e-18) {
          p = std::move(cand);
          fp = fc;
          eta = try_eta;
          improved = true;
        }
      }
      if (!improved) break;
    }
    if (fp > best) {
      best = fp;
      best_p = p;
    }
  }
  return {best, std::move(best_p)};
}

}  // namespace detail

/// Unassisted zero-rate exponent max_p p^T A p. Closed form for |X| = 2;
/// multistart ascent cross-checked against the DNN bound for |X| <= 4 (where
/// the relaxation is exact); ascent/DNN sandwich beyond that.
inline CertifiedValue unassisted_zero_rate(const Channel& w, double tol = 1e-8,
                                           std::uint64_t seed = kDefaultSeed) {
  BhattMatrix a = bhattacharyya_matrix(w);
  CertifiedValue r;
  r.argmax_p = uniform_dist(w.x_alphabet());
  r.argmin_q = uniform_dist(w.y_alphabet());
  if (!a.all_finite()) {
    r.lower = r.upper = r.value = std::numeric_limits<double>::infinity();
    r.status = SolveStatus::kInfinite;
    return r;
  }
  if (w.nx() == 1) {
    r.status = SolveStatus::kOptimal;
    return r;
  }
  if (w.nx() == 2) {
    // max 2 p (1-p) A01 = A01 / 2 at p = 1/2.
    r.lower = r.upper = r.value = 0.5 * a(0, 1);
    r.gap = 0.0;
    r.argmax_p = Dist(w.x_alphabet(), {0.5, 0.5});
    r.status = SolveStatus::kOptimal;
    return r;
  }
  auto [ascent, p] = detail::quadratic_form_ascent(a, seed);
  double upper = dnn_bound(w, tol);
  r.lower = ascent;
  r.upper = std::max(upper, ascent);  // weak-duality guard against residual noise
  r.value = 0.5 * (r.lower + r.upper);
  r.gap = r.upper - r.lower;
  r.argmax_p = Dist(w.x_alphabet(), p);
  if (w.nx() <= 4)
    r.status = r.gap <= std::max(tol, 1e-7) ? SolveStatus::kOptimal : SolveStatus::kNoConvergence;
  else
    r.status = SolveStatus::kOptimal;
  return r;
}

/// Zero-rate exponent of L-list decoding: max_P ell_{L+1, u_{L+1}}(W, P),
/// reported as the achieved ascent value; upper certificate is U(W).
inline CertifiedValue list_zero_rate(int list_size, const Channel& w, double tol = 1e-8,
                                     std::uint64_t seed = kDefaultSeed) {
  if (list_size < 1) throw ProbError("list_zero_rate: L must be >= 1");
  const int k = list_size + 1;
  const std::size_t d = w.nx();
  EllSpec spec = EllSpec::uniform(k);

  auto ell_at = [&](std::span<const double> p) -> ExtReal {
    std::vector<double> pv(p.begin(), p.end());
    double s = 0.0;
    for (double v : pv) s += v;
    for (double& v : pv) v /= s;
    return ell_kq(spec, Dist(w.x_alphabet(), pv), w);
  };

  // Gradient via (k-1)-compositions: d ell / d P(x) =
  //   k * sum_m multinom(k-1, m) prod P^m f((m + e_x)/k).
  auto grad_at = [&](std::span<const double> p) {
    std::vector<double> g(d, 0.0), v(d);
    detail::for_each_composition(k - 1, d, [&](const std::vector<int>& counts) {
      double logw = std::lgamma(static_cast<double>(k));
      bool zero = false;
      for (std::size_t x = 0; x < d; ++x) {
        logw -= std::lgamma(counts[x] + 1.0);
        if (counts[x] > 0) {
          if (p[x] <= kSupportEps) {
            zero = true;
            break;
          }
          logw += counts[x] * std::log(p[x]);
        }
      }
      if (zero) return;
      double weight = std::exp(logw);
      for (std::size_t x = 0; x < d; ++x) {
        for (std::size_t xx = 0; xx < d; ++xx)
          v[xx] = (counts[xx] + (xx == x ? 1.0 : 0.0)) / k;
        ExtReal f = geometric_mixture_exponent(w, v);
        if (f.is_finite()) g[x] += k * weight * f.as_double();
      }
    });
    return g;
  };

  CertifiedValue u = channel_umlaut(w, tol, seed);
  CertifiedValue r;
  r.argmin_q = u.argmin_q;

  auto starts = detail::simplex_restarts(d, seed);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> best_p;
  for (auto p : starts) {
    ExtReal e0 = ell_at(p);
    if (e0.is_infinite()) {
      r.lower = r.upper = r.value = std::numeric_limits<double>::infinity();
      r.argmax_p = Dist(w.x_alphabet(), p);
      r.status = SolveStatus::kInfinite;
      return r;
    }
    double fp = e0.as_double();
    double eta = 1.0;
    for (int it = 0; it < 2000; ++it) {
      std::vector<double> g = grad_at(p);
      bool improved = false;
      double try_eta = eta * 2.0;
      for (int bt = 0; bt < 50 && !improved; ++bt, try_eta *= 0.5) {
        std::vector<double> cand(d);
        for (std::size_t i = 0; i < d; ++i) cand[i] = p[i] + try_eta * g[i];
        detail::project_to_simplex(cand);
        ExtReal fc = ell_at(cand);
        if (fc.is_finite() && fc.as_double() > fp + 1e-18) {
          p = std::move(cand);
          fp = fc.as_double();
          eta = try_eta;
          improved = true;
        }
      }
      if (!improved) break;
    }
    if (fp > best) {
      best = fp;
      best_p = p;
    }
  }

  r.lower = best;
  r.upper = u.is_infinite() ? std::numeric_limits<double>::infinity()
                            : std::max(u.upper, best);
  r.value = best;  // the exponent itself; `upper` is the large-list limit bound
  r.gap = r.upper - r.lower;
  r.argmax_p = Dist(w.x_alphabet(), best_p);
  r.status = SolveStatus::kOptimal;
  return r;
}

/// Quantitative gap certificate U(W) - E_L(0+, W) <= bound.
struct GapBound {
  int list_size;
  double epsilon;
  double bound;
  double pbar_min;
  double w_min;
};

/// Evaluates the finite-list gap bound
///   |X| exp(-(eps^2/2) pbar_min (L+1)) - eps log W_min,
/// at eps = min{ sqrt(log(L+1) / (pbar_min (L+1))), 1/2 }, where pbar should
/// be the input distribution achieving U(W).
inline GapBound list_gap_bound(int list_size, const Channel& w, const Dist& pbar) {
  if (list_size < 1) throw ProbError("list_gap_bound: L must be >= 1");
  if (!(pbar.alphabet() == w.x_alphabet()))
    throw AlphabetMismatch("list_gap_bound: pbar not over W's input alphabet");
  double pmin = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < pbar.size(); ++x)
    if (pbar[x] > kSupportEps) pmin = std::min(pmin, pbar[x]);
  if (!std::isfinite(pmin) || pmin <= 0.0)
    throw DegenerateSupport("list_gap_bound: pbar has empty support");
  double wmin = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < w.nx(); ++x)
    for (std::size_t y = 0; y < w.ny(); ++y)
      if (w(y, x) > 0.0) wmin = std::min(wmin, w(y, x));

  const double l1 = static_cast<double>(list_size) + 1.0;
  double eps = std::min(std::sqrt(std::log(l1) / (pmin * l1)), 0.5);
  double bound = static_cast<double>(w.nx()) * std::exp(-0.5 * eps * eps * pmin * l1) -
                 eps * std::log(wmin);
  return {list_size, eps, bound, pmin, wmin};
}

}  // namespace umlaut
