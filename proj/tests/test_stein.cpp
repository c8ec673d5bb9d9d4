#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "test_util.hpp"
#include "umlaut/stein.hpp"

using namespace umlaut;
using Catch::Approx;

namespace {

JointDist pv_counterexample() {
  auto bin = Alphabet::indexed(2);
  return make_joint({{0.0, 1.0 / 3.0}, {1.0 / 3.0, 1.0 / 3.0}}, bin, bin);
}

}  // namespace

TEST_CASE("stein sandwich on the PV counterexample") {
  SteinReport rep = stein_sandwich(pv_counterexample(), 6, 0.2, 0.8);
  CHECK(rep.target == Approx(2.0 / 3.0 * std::log(2.0)).margin(1e-12));
  CHECK(rep.lower.size() == 6);
  for (int n = 1; n <= 6; ++n) {
    CHECK(rep.lower[n - 1] <= rep.upper[n - 1] + 1e-12);
    CHECK(rep.lower[n - 1] <= rep.target + 1e-9);
    CHECK(rep.target <= rep.upper[n - 1] + 1e-9);
  }
  for (int n = 2; n <= 6; ++n) CHECK(rep.upper[n - 1] <= rep.upper[n - 2] + 1e-12);
  // the sandwich tightens with n
  CHECK(rep.upper[5] - rep.lower[5] < rep.upper[1] - rep.lower[1]);
}

TEST_CASE("stein sandwich on a product distribution targets zero") {
  std::mt19937_64 rng(kDefaultSeed);
  Dist p = testutil::random_dist(rng, 2, 0.1);
  Dist q = testutil::random_dist(rng, 2, 0.1);
  std::vector<double> mass(4);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) mass[x * 2 + y] = p[x] * q[y];
  JointDist j(Alphabet::indexed(2), Alphabet::indexed(2), std::move(mass));
  SteinReport rep = stein_sandwich(j, 6, 0.3, 0.7);
  CHECK(rep.target == Approx(0.0).margin(1e-10));
  for (int n = 1; n <= 6; ++n) {
    CHECK(rep.upper[n - 1] == Approx(-std::log(1.0 - 0.3) / n).margin(1e-9));
    CHECK(rep.lower[n - 1] <= 1e-9);
  }
}

TEST_CASE("stein sandwich across eps keeps the target inside") {
  JointDist j = pv_counterexample();
  for (double eps : {0.1, 0.5, 0.9}) {
    SteinReport rep = stein_sandwich(j, 4, eps, 0.8);
    CHECK(rep.lower[3] <= rep.target + 1e-9);
    CHECK(rep.target <= rep.upper[3] + 1e-9);
  }
}

TEST_CASE("the product test attains the advertised type-I error") {
  JointDist j = pv_counterexample();
  UmlautResult u = umlaut_info(j);
  Dist px = j.marginal_x();
  std::vector<double> null1(4), alt1 = j.mass();
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) null1[x * 2 + y] = px[x] * u.marginal[y];
  std::vector<double> null_n = null1, alt_n = alt1;
  for (int n = 2; n <= 4; ++n) {
    std::vector<double> nn(null_n.size() * 4), aa(alt_n.size() * 4);
    for (std::size_t i = 0; i < null_n.size(); ++i)
      for (std::size_t l = 0; l < 4; ++l) {
        nn[i * 4 + l] = null_n[i] * null1[l];
        aa[i * 4 + l] = alt_n[i] * alt1[l];
      }
    null_n = std::move(nn);
    alt_n = std::move(aa);
  }
  HypoTestResult ht = dh_eps(0.2, std::span<const double>(null_n),
                             std::span<const double>(alt_n));
  CHECK(ht.type1 <= 0.2 + 1e-12);
}

TEST_CASE("stein guards") {
  JointDist j = pv_counterexample();
  CHECK_THROWS_AS(stein_sandwich(j, 13, 0.2, 0.8), TooLarge);  // 4^13 > 2^24
  CHECK_THROWS_AS(stein_sandwich(j, 3, 1.2, 0.8), ProbError);
  CHECK_THROWS_AS(stein_sandwich(j, 3, 0.2, 1.8), BadAlpha);
}
