#pragma once

// Umlaut information of joint distributions: the umlaut-marginal, the closed
// form, the Renyi variant with its admissible output set Y*, and the lautum /
// mutual informations for comparison.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "umlaut/divergences.hpp"
#include "umlaut/prob.hpp"

namespace umlaut {

struct UmlautResult {
  ExtReal value;
  Dist marginal;       // the optimiser Q_Y*
  double normalizer;   // Z[P_XY]
};

struct RenyiUmlautResult {
  double alpha;
  ExtReal value;
  Dist marginal;            // alpha-umlaut marginal, zero outside ystar for alpha > 1
  std::vector<bool> ystar;  // admissible output symbols (alpha > 1); all-true otherwise
};

namespace detail {

// Exponents S_y = sum_{x in supp(P_X)} P_X(x) log P_XY(x,y), with the column
// killed (-inf) when some supported x has P_XY(x,y) = 0 exactly.
inline std::vector<double> umlaut_exponents(const JointDist& j, const Dist& px) {
  std::vector<double> s(j.ny(), 0.0);
  for (std::size_t y = 0; y < j.ny(); ++y) {
    double acc = 0.0;
    bool killed = false;
    for (std::size_t x = 0; x < j.nx() && !killed; ++x) {
      if (px[x] <= kSupportEps) continue;
      double m = j(x, y);
      if (m <= 0.0) {
        killed = true;
      } else {
        acc += px[x] * std::log(m);
      }
    }
    s[y] = killed ? -std::numeric_limits<double>::infinity() : acc;
  }
  return s;
}

// Stable (Z, weights) from exponents; throws AllZero when every column died.
inline std::pair<double, std::vector<double>> normalize_exponents(
    const std::vector<double>& s) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : s) m = std::max(m, v);
  if (!std::isfinite(m)) throw AllZero("umlaut_marginal: every output column has weight 0");
  double z = 0.0;
  std::vector<double> w(s.size(), 0.0);
  for (std::size_t y = 0; y < s.size(); ++y) {
    if (std::isfinite(s[y])) {
      w[y] = std::exp(s[y] - m);
      z += w[y];
    }
  }
  for (double& v : w) v /= z;
  return {std::exp(m) * z, std::move(w)};
}

}  // namespace detail

/// Umlaut-marginal of a joint distribution together with its normalisation
/// constant Z. Throws AllZero when the umlaut information diverges.
inline std::pair<Dist, double> umlaut_marginal(const JointDist& j) {
  Dist px = j.marginal_x();
  auto exponents = detail::umlaut_exponents(j, px);
  auto [z, w] = detail::normalize_exponents(exponents);
  return {Dist(j.y_alphabet(), std::move(w)), z};
}

/// Closed-form umlaut information U(X;Y) = -H(P_X) - log Z[P_XY].
/// +inf exactly when no output symbol is compatible with all of supp(P_X).
inline UmlautResult umlaut_info(const JointDist& j) {
  Dist px = j.marginal_x();
  auto exponents = detail::umlaut_exponents(j, px);
  double m = -std::numeric_limits<double>::infinity();
  for (double v : exponents) m = std::max(m, v);
  if (!std::isfinite(m))
    return {ExtReal::infinity(), uniform_dist(j.y_alphabet()), 0.0};
  double zs = 0.0;
  std::vector<double> w(exponents.size(), 0.0);
  for (std::size_t y = 0; y < exponents.size(); ++y) {
    if (std::isfinite(exponents[y])) {
      w[y] = std::exp(exponents[y] - m);
      zs += w[y];
    }
  }
  double log_z = m + std::log(zs);
  for (double& v : w) v /= zs;
  double value = clamp_divergence(-entropy(px) - log_z);
  return {ExtReal(value), Dist(j.y_alphabet(), std::move(w)), std::exp(log_z)};
}

/// Renyi alpha-umlaut information with its optimiser.
/// alpha < 1: the (1/(1-alpha))-norm closed form over all outputs.
/// alpha > 1: normaliser restricted to Y* = {y : P_XY(x,y) > 0 for all
/// supported x}; +inf with empty Y* when no admissible output exists.
inline RenyiUmlautResult renyi_umlaut_info(double alpha, const JointDist& j) {
  if (!(alpha > 0.0) || alpha == 1.0)
    throw BadAlpha("renyi_umlaut_info: alpha must be in (0,1) or (1,inf)");
  Dist px = j.marginal_x();
  const double p1a = 1.0 / (1.0 - alpha);
  std::vector<bool> ystar(j.ny(), true);

  // log w(y) = (1/(1-alpha)) log sum_x P_X^alpha(x) P_XY^{1-alpha}(x,y),
  // evaluated in the log domain.
  std::vector<double> logw(j.ny(), -std::numeric_limits<double>::infinity());
  for (std::size_t y = 0; y < j.ny(); ++y) {
    std::vector<double> terms;
    bool admissible = true;
    for (std::size_t x = 0; x < j.nx(); ++x) {
      if (px[x] <= kSupportEps) continue;
      double mxy = j(x, y);
      if (mxy <= 0.0) {
        admissible = false;
        if (alpha > 1.0) break;
        continue;  // alpha < 1: the term vanishes
      }
      terms.push_back(alpha * std::log(px[x]) + (1.0 - alpha) * std::log(mxy));
    }
    if (alpha > 1.0) {
      ystar[y] = admissible;
      if (!admissible) continue;
    } else {
      if (terms.empty()) continue;  // whole column carries no mass
    }
    double m = *std::max_element(terms.begin(), terms.end());
    double s = 0.0;
    for (double t : terms) s += std::exp(t - m);
    logw[y] = p1a * (m + std::log(s));
  }

  double m = -std::numeric_limits<double>::infinity();
  for (double v : logw) m = std::max(m, v);
  if (!std::isfinite(m)) {
    // Empty Y* (alpha > 1): the optimiser can be any distribution.
    return {alpha, ExtReal::infinity(), uniform_dist(j.y_alphabet()), std::move(ystar)};
  }
  double zs = 0.0;
  std::vector<double> w(j.ny(), 0.0);
  for (std::size_t y = 0; y < j.ny(); ++y) {
    if (std::isfinite(logw[y])) {
      w[y] = std::exp(logw[y] - m);
      zs += w[y];
    }
  }
  double value = clamp_divergence(-(m + std::log(zs)));
  for (double& v : w) v /= zs;
  if (alpha < 1.0) ystar.assign(j.ny(), true);
  return {alpha, ExtReal(value), Dist(j.y_alphabet(), std::move(w)), std::move(ystar)};
}

/// (lautum, mutual): L(X:Y) = D(P_X P_Y || P_XY), possibly +inf;
/// I(X:Y) = D(P_XY || P_X P_Y), always finite.
inline std::pair<ExtReal, double> lautum_mutual(const JointDist& j) {
  Dist px = j.marginal_x();
  Dist py = j.marginal_y();
  std::vector<double> prod(j.nx() * j.ny());
  for (std::size_t x = 0; x < j.nx(); ++x)
    for (std::size_t y = 0; y < j.ny(); ++y) prod[x * j.ny() + y] = px[x] * py[y];
  ExtReal lautum = kl(std::span<const double>(prod), std::span<const double>(j.mass()));
  ExtReal mutual = kl(std::span<const double>(j.mass()), std::span<const double>(prod));
  return {lautum, mutual.as_double()};
}

}  // namespace umlaut
