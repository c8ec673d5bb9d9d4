#pragma once

// Closed-form umlaut information for jointly Gaussian variables and for the
// additive-noise Gaussian channel. Schur-complement linear algebra with
// Cholesky factorisations and a condition-number guard.

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "umlaut/prob.hpp"

namespace umlaut {

struct SingularCovariance : ProbError {
  using ProbError::ProbError;
};
struct RankDeficient : ProbError {
  using ProbError::ProbError;
};

/// Jointly Gaussian (X, Y) with X-dimension n and Y-dimension k.
struct GaussianJoint {
  int n = 0;
  int k = 0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd v;  // (n+k) x (n+k), symmetric positive definite

  GaussianJoint(int n_, int k_, Eigen::VectorXd mean_, Eigen::MatrixXd v_)
      : n(n_), k(k_), mean(std::move(mean_)), v(std::move(v_)) {
    if (n < 1 || k < 1) throw ProbError("GaussianJoint: dimensions must be positive");
    const int d = n + k;
    if (mean.size() != d || v.rows() != d || v.cols() != d)
      throw ShapeMismatch("GaussianJoint: mean/covariance dimensions do not match");
    if ((v - v.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw SingularCovariance("GaussianJoint: covariance not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v);
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().maxCoeff();
    if (lo <= 1e-10) throw SingularCovariance("GaussianJoint: covariance not positive definite");
    if (hi / lo > 1e12) throw SingularCovariance("GaussianJoint: condition number beyond 1e12");
  }
};

struct GaussianUmlautResult {
  Eigen::VectorXd mean_y;
  Eigen::MatrixXd cov_y;  // Schur complement V/V_XX
  double value = 0.0;     // nats
};

namespace detail {

inline double logdet_spd(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw SingularCovariance(std::string(what) + ": Cholesky failed");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace detail

/// Umlaut-marginal (Gaussian with mean m_Y and covariance V/V_XX) and the
/// closed-form value
///   U = 1/2 log det V / det(V_XX + (V/V_XX))
///     + 1/2 tr[V^{-1} (V_XX + (V/V_XX))] - (n+k)/2,
/// where + denotes the block-diagonal direct sum.
inline GaussianUmlautResult gaussian_umlaut(const GaussianJoint& j) {
  const int n = j.n, k = j.k;
  Eigen::MatrixXd vxx = j.v.topLeftCorner(n, n);
  Eigen::MatrixXd vxy = j.v.topRightCorner(n, k);
  Eigen::MatrixXd vyy = j.v.bottomRightCorner(k, k);

  Eigen::LLT<Eigen::MatrixXd> llt_xx(vxx);
  if (llt_xx.info() != Eigen::Success)
    throw SingularCovariance("gaussian_umlaut: V_XX not positive definite");
  Eigen::MatrixXd schur = vyy - vxy.transpose() * llt_xx.solve(vxy);
  schur = 0.5 * (schur + schur.transpose().eval());  // symmetrise roundoff

  Eigen::MatrixXd direct_sum = Eigen::MatrixXd::Zero(n + k, n + k);
  direct_sum.topLeftCorner(n, n) = vxx;
  direct_sum.bottomRightCorner(k, k) = schur;

  Eigen::LLT<Eigen::MatrixXd> llt_v(j.v);
  if (llt_v.info() != Eigen::Success)
    throw SingularCovariance("gaussian_umlaut: V not positive definite");
  double logdet_v = detail::logdet_spd(j.v, "gaussian_umlaut");
  double logdet_sum = detail::logdet_spd(direct_sum, "gaussian_umlaut");
  double trace_term = llt_v.solve(direct_sum).trace();

  GaussianUmlautResult res;
  res.mean_y = j.mean.tail(k);
  res.cov_y = schur;
  res.value = 0.5 * (logdet_v - logdet_sum) + 0.5 * trace_term - 0.5 * (n + k);
  res.value = clamp_divergence(res.value);
  return res;
}

/// Additive-noise Gaussian channel Y = H X + N with N ~ G(m, V), input
/// covariance constrained to C.
struct GaussianChannelSpec {
  Eigen::MatrixXd h;  // k x n
  Eigen::VectorXd m;  // k
  Eigen::MatrixXd v;  // k x k noise covariance, positive definite
  Eigen::MatrixXd c;  // n x n input covariance, positive semidefinite

  GaussianChannelSpec(Eigen::MatrixXd h_, Eigen::VectorXd m_, Eigen::MatrixXd v_,
                      Eigen::MatrixXd c_)
      : h(std::move(h_)), m(std::move(m_)), v(std::move(v_)), c(std::move(c_)) {
    const int k = static_cast<int>(h.rows()), n = static_cast<int>(h.cols());
    if (m.size() != k || v.rows() != k || v.cols() != k || c.rows() != n || c.cols() != n)
      throw ShapeMismatch("GaussianChannelSpec: inconsistent dimensions");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ev(v);
    if (ev.eigenvalues().minCoeff() <= 1e-10)
      throw SingularCovariance("GaussianChannelSpec: V not positive definite");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ec(c);
    if (ec.eigenvalues().minCoeff() < -1e-10)
      throw SingularCovariance("GaussianChannelSpec: C not positive semidefinite");
  }
};

/// U(W_{H,m,V}) = 1/2 tr[C H^T V^{-1} H]; requires k <= n and rank(H) = k,
/// and does not depend on the noise mean.
inline double gaussian_channel_umlaut(const GaussianChannelSpec& spec) {
  const int k = static_cast<int>(spec.h.rows()), n = static_cast<int>(spec.h.cols());
  if (k > n) throw RankDeficient("gaussian_channel_umlaut: needs k <= n");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(spec.h);
  qr.setThreshold(1e-12);
  if (qr.rank() < k) throw RankDeficient("gaussian_channel_umlaut: H must have full row rank");
  Eigen::LLT<Eigen::MatrixXd> llt(spec.v);
  if (llt.info() != Eigen::Success)
    throw SingularCovariance("gaussian_channel_umlaut: V not positive definite");
  double value = 0.5 * (spec.c * spec.h.transpose() * llt.solve(spec.h)).trace();
  return clamp_divergence(value);
}

}  // namespace umlaut
