#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "umlaut/gaussian.hpp"
#include "umlaut/umlaut_dist.hpp"

using namespace umlaut;
using Catch::Approx;

namespace {

GaussianJoint corr_pair(double rho, double mx = 0.0, double my = 0.0) {
  Eigen::VectorXd mean(2);
  mean << mx, my;
  Eigen::MatrixXd v(2, 2);
  v << 1.0, rho, rho, 1.0;
  return GaussianJoint(1, 1, mean, v);
}

Eigen::MatrixXd random_spd(std::mt19937_64& rng, int d) {
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = 2.0 * testutil::u01(rng) - 1.0;
  return a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(d, d);
}

}  // namespace

TEST_CASE("1-D correlated Gaussian closed form") {
  for (double rho : {0.0, 0.1, 0.3, 0.5, 0.7, 0.9}) {
    GaussianUmlautResult r = gaussian_umlaut(corr_pair(rho));
    double expected = rho * rho / (2.0 * (1.0 - rho * rho));
    CHECK(r.value == Approx(expected).margin(1e-10));
    CHECK(r.cov_y(0, 0) == Approx(1.0 - rho * rho).margin(1e-12));
  }
  CHECK(gaussian_umlaut(corr_pair(0.5)).value == Approx(1.0 / 6.0).margin(1e-12));
}

TEST_CASE("value is invariant under mean shifts") {
  GaussianUmlautResult a = gaussian_umlaut(corr_pair(0.6));
  GaussianUmlautResult b = gaussian_umlaut(corr_pair(0.6, 3.5, -2.0));
  CHECK(a.value == Approx(b.value).margin(1e-14));
  CHECK(b.mean_y(0) == -2.0);
}

TEST_CASE("umlaut-marginal covariance is dominated by V_YY") {
  std::mt19937_64 rng(kDefaultSeed);
  for (int t = 0; t < 12; ++t) {
    int n = 1 + static_cast<int>(rng() % 3);
    int k = 1 + static_cast<int>(rng() % 3);
    Eigen::MatrixXd v = random_spd(rng, n + k);
    GaussianJoint j(n, k, Eigen::VectorXd::Zero(n + k), v);
    GaussianUmlautResult r = gaussian_umlaut(j);
    Eigen::MatrixXd vyy = v.bottomRightCorner(k, k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(vyy - r.cov_y);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    CHECK(r.value >= -1e-12);
  }
}

TEST_CASE("block-diagonal joints add up") {
  std::mt19937_64 rng(kDefaultSeed + 1);
  for (int t = 0; t < 8; ++t) {
    Eigen::MatrixXd v1 = random_spd(rng, 2);  // 1+1 joint
    Eigen::MatrixXd v2 = random_spd(rng, 3);  // 2+1 joint
    GaussianJoint a(1, 1, Eigen::VectorXd::Zero(2), v1);
    GaussianJoint b(2, 1, Eigen::VectorXd::Zero(3), v2);
    // direct sum arranged as (X1, X2) x (Y1, Y2)
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(5, 5);
    // X block: X1 = a's x, X2 = b's two x's
    v(0, 0) = v1(0, 0);
    v.block(1, 1, 2, 2) = v2.topLeftCorner(2, 2);
    // Y block
    v(3, 3) = v1(1, 1);
    v(4, 4) = v2(2, 2);
    // cross blocks
    v(0, 3) = v1(0, 1);
    v(3, 0) = v1(1, 0);
    v.block(1, 4, 2, 1) = v2.topRightCorner(2, 1);
    v.block(4, 1, 1, 2) = v2.bottomLeftCorner(1, 2);
    GaussianJoint sum(3, 2, Eigen::VectorXd::Zero(5), v);
    CHECK(gaussian_umlaut(sum).value ==
          Approx(gaussian_umlaut(a).value + gaussian_umlaut(b).value).margin(1e-10));
  }
}

TEST_CASE("U vanishes exactly on independence") {
  std::mt19937_64 rng(kDefaultSeed + 2);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(4, 4);
  v.topLeftCorner(2, 2) = random_spd(rng, 2);
  v.bottomRightCorner(2, 2) = random_spd(rng, 2);
  GaussianJoint j(2, 2, Eigen::VectorXd::Zero(4), v);
  CHECK(gaussian_umlaut(j).value == Approx(0.0).margin(1e-10));
}

TEST_CASE("invalid covariances are rejected") {
  Eigen::MatrixXd v(2, 2);
  v << 1.0, 2.0, 2.0, 1.0;  // indefinite
  CHECK_THROWS_AS(GaussianJoint(1, 1, Eigen::VectorXd::Zero(2), v), SingularCovariance);
  Eigen::MatrixXd w(2, 2);
  w << 1.0, 0.5, 0.4999, 1.0;  // asymmetric
  CHECK_THROWS_AS(GaussianJoint(1, 1, Eigen::VectorXd::Zero(2), w), SingularCovariance);
}

TEST_CASE("Gaussian channel closed form and cross-check") {
  double rho = 0.5;
  Eigen::MatrixXd h(1, 1), v(1, 1), c(1, 1);
  h << rho;
  v << 1.0 - rho * rho;
  c << 1.0;
  Eigen::VectorXd m = Eigen::VectorXd::Zero(1);
  double channel = gaussian_channel_umlaut(GaussianChannelSpec(h, m, v, c));
  CHECK(channel == Approx(rho * rho / (2.0 * (1.0 - rho * rho))).margin(1e-12));
  CHECK(channel == Approx(gaussian_umlaut(corr_pair(rho)).value).margin(1e-10));

  // scalar SNR form
  Eigen::MatrixXd h1(1, 1), vs(1, 1), cp(1, 1);
  h1 << 1.0;
  vs << 2.0;  // sigma^2
  cp << 3.0;  // P
  CHECK(gaussian_channel_umlaut(GaussianChannelSpec(h1, m, vs, cp)) ==
        Approx(3.0 / (2.0 * 2.0)).margin(1e-12));

  // noise mean is irrelevant
  Eigen::VectorXd m2(1);
  m2 << 42.0;
  CHECK(gaussian_channel_umlaut(GaussianChannelSpec(h, m2, v, c)) ==
        Approx(channel).margin(1e-14));

  // H = 0 has rank 0 < k
  Eigen::MatrixXd h0 = Eigen::MatrixXd::Zero(1, 1);
  CHECK_THROWS_AS(gaussian_channel_umlaut(GaussianChannelSpec(h0, m, v, c)), RankDeficient);
}

TEST_CASE("discretised 1-D joint approaches the continuous value") {
  const int n = 64;
  const double lo = -5.0, hi = 5.0, rho = 0.5;
  std::vector<double> mass(n * n);
  double step = (hi - lo) / n, total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      double x = lo + (i + 0.5) * step;
      double y = lo + (k + 0.5) * step;
      mass[i * n + k] =
          std::exp(-(x * x - 2.0 * rho * x * y + y * y) / (2.0 * (1.0 - rho * rho)));
      total += mass[i * n + k];
    }
  for (double& v : mass) v /= total;
  JointDist j(Alphabet::indexed(n), Alphabet::indexed(n), std::move(mass));
  double cont = rho * rho / (2.0 * (1.0 - rho * rho));
  CHECK(std::abs(umlaut_info(j).value.as_double() - cont) <= 0.02);
}
