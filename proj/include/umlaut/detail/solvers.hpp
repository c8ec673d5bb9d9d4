#pragma once

// Shared optimisation machinery: seeded sampling on the simplex, Euclidean
// simplex projection, entropic mirror steps with backtracking, and the
// restart-point scheme used by the channel solvers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "umlaut/prob.hpp"

namespace umlaut::detail {

// Portable uniform in (0,1): top 53 bits of the engine output. Standard
// distributions are implementation-defined, which would break byte-identical
// reproducibility across toolchains.
inline double uniform01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline std::vector<double> dirichlet1(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> v(n);
  double s = 0.0;
  for (double& x : v) {
    x = -std::log(uniform01(rng));  // Exp(1)
    s += x;
  }
  for (double& x : v) x /= s;
  return v;
}

/// Euclidean projection onto the probability simplex. The final rescale
/// sheds the few-ulp drift so downstream mass invariants hold exactly.
inline void project_to_simplex(std::vector<double>& v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  double check = 0.0;
  for (double& x : v) {
    x = std::max(0.0, x - theta);
    check += x;
  }
  if (check > 0.0)
    for (double& x : v) x /= check;
  else
    v.assign(v.size(), 1.0 / static_cast<double>(v.size()));
}

/// Restart points for simplex searches: uniform, every face barycenter when
/// |X| <= 6 (vertices otherwise), and `n_random` Dirichlet(1) draws.
inline std::vector<std::vector<double>> simplex_restarts(std::size_t n, std::uint64_t seed,
                                                         int n_random = 8) {
  std::vector<std::vector<double>> starts;
  starts.emplace_back(n, 1.0 / static_cast<double>(n));
  if (n <= 6) {
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      if (mask == (1u << n) - 1) continue;  // full face == uniform start
      std::vector<double> p(n, 0.0);
      int bits = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (1u << i)) ++bits;
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (1u << i)) p[i] = 1.0 / bits;
      starts.push_back(std::move(p));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> p(n, 0.0);
      p[i] = 1.0;
      starts.push_back(std::move(p));
    }
  }
  std::mt19937_64 rng(seed);
  for (int k = 0; k < n_random; ++k) starts.push_back(dirichlet1(rng, n));
  return starts;
}

}  // namespace umlaut::detail
