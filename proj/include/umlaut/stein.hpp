#pragma once

// Finite-blocklength verification of the composite hypothesis-testing
// interpretation: at every n, an explicit product test upper-bounds the
// composite Stein quantity and the single-letter Renyi bound lower-bounds it,
// sandwiching the umlaut information.

#include <cmath>
#include <vector>

#include "umlaut/divergences.hpp"
#include "umlaut/prob.hpp"
#include "umlaut/umlaut_dist.hpp"

namespace umlaut {

struct SteinReport {
  int n_max = 0;
  double eps = 0.0;
  double alpha = 0.0;
  double target = 0.0;        // U(X;Y)
  std::vector<double> lower;  // lower[i] bounds the quantity at n = i+1
  std::vector<double> upper;
};

/// For each n <= n_max:
///   upper(n) = (1/n) D_H^eps(P_X^n x Umarg^n || P_XY^n)  (product-test ansatz)
///   lower(n) = U_alpha(X;Y) + (alpha / ((1-alpha) n)) log(eps).
/// The outcome grids are materialised exactly; guard (|X||Y|)^n_max <= 2^24.
inline SteinReport stein_sandwich(const JointDist& j, int n_max, double eps, double alpha) {
  if (n_max < 1) throw ProbError("stein_sandwich: n_max must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw ProbError("stein_sandwich: eps must be in (0,1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw BadAlpha("stein_sandwich: alpha must be in (0,1)");
  const double cells = static_cast<double>(j.nx() * j.ny());
  if (n_max * std::log(cells) > 24.0 * std::log(2.0))
    throw TooLarge("stein_sandwich: (|X||Y|)^n_max exceeds 2^24");

  UmlautResult u = umlaut_info(j);
  if (u.value.is_infinite())
    throw AllZero("stein_sandwich: umlaut information diverges for this joint");
  RenyiUmlautResult ua = renyi_umlaut_info(alpha, j);

  // Single-copy null: P_X x umlaut-marginal, flattened like the joint's mass.
  Dist px = j.marginal_x();
  std::vector<double> null1(j.nx() * j.ny());
  for (std::size_t x = 0; x < j.nx(); ++x)
    for (std::size_t y = 0; y < j.ny(); ++y)
      null1[x * j.ny() + y] = px[x] * u.marginal[y];
  const std::vector<double>& alt1 = j.mass();

  SteinReport rep;
  rep.n_max = n_max;
  rep.eps = eps;
  rep.alpha = alpha;
  rep.target = u.value.as_double();

  std::vector<double> null_n{1.0}, alt_n{1.0};
  for (int n = 1; n <= n_max; ++n) {
    // Extend the product grids by one factor (index arithmetic, no labels).
    std::vector<double> next_null(null_n.size() * null1.size());
    std::vector<double> next_alt(alt_n.size() * alt1.size());
    for (std::size_t i = 0; i < null_n.size(); ++i)
      for (std::size_t l = 0; l < null1.size(); ++l) {
        next_null[i * null1.size() + l] = null_n[i] * null1[l];
        next_alt[i * alt1.size() + l] = alt_n[i] * alt1[l];
      }
    null_n = std::move(next_null);
    alt_n = std::move(next_alt);

    HypoTestResult ht = dh_eps(eps, std::span<const double>(null_n),
                               std::span<const double>(alt_n));
    rep.upper.push_back(ht.value.as_double() / n);
    rep.lower.push_back(ua.value.as_double() +
                        alpha / ((1.0 - alpha) * n) * std::log(eps));
  }
  return rep;
}

}  // namespace umlaut
