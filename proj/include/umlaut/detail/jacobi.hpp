#pragma once

// Cyclic Jacobi eigendecomposition for small dense symmetric matrices, plus
// the PSD projection built on it. Row-major d x d storage.

#include <cmath>
#include <cstddef>
#include <vector>

namespace umlaut::detail {

/// Eigendecomposition A = V diag(w) V^T of a symmetric matrix by cyclic
/// Jacobi rotations. `a` is consumed; V is returned row-major.
inline void jacobi_eigensymmetric(std::vector<double> a, std::size_t d,
                                  std::vector<double>& w, std::vector<double>& v) {
  v.assign(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0;
  auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * d + j]; };
  auto V = [&](std::size_t i, std::size_t j) -> double& { return v[i * d + j]; };

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) off += A(p, q) * A(p, q);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        double apq = A(p, q);
        if (std::abs(apq) < 1e-300) continue;
        double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < d; ++k) {
          double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  w.resize(d);
  for (std::size_t i = 0; i < d; ++i) w[i] = a[i * d + i];
}

/// Euclidean projection onto the positive semidefinite cone: eigenvalues
/// clipped at zero.
inline std::vector<double> project_psd(const std::vector<double>& m, std::size_t d) {
  std::vector<double> w, v;
  jacobi_eigensymmetric(m, d, w, v);
  std::vector<double> out(d * d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    if (w[k] <= 0.0) continue;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) out[i * d + j] += w[k] * v[i * d + k] * v[j * d + k];
  }
  return out;
}

}  // namespace umlaut::detail
