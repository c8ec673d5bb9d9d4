#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "umlaut/exponents.hpp"
#include "umlaut/umlaut_dist.hpp"

using namespace umlaut;
using Catch::Approx;

namespace {

Channel identity2() {
  return make_channel({{1.0, 0.0}, {0.0, 1.0}}, Alphabet::indexed(2), Alphabet::indexed(2));
}

Channel constant2() {
  return make_channel({{0.4, 0.6}, {0.4, 0.6}}, Alphabet::indexed(2), Alphabet::indexed(2));
}

// Brute-force ell evaluation by direct tuple enumeration.
double ell_direct(int k, const Dist& p, const Channel& w) {
  std::vector<std::size_t> tuple(k, 0);
  std::vector<double> v(w.nx());
  double acc = 0.0;
  while (true) {
    double weight = 1.0;
    for (int i = 0; i < k; ++i) weight *= p[tuple[i]];
    if (weight > 0.0) {
      std::fill(v.begin(), v.end(), 0.0);
      for (int i = 0; i < k; ++i) v[tuple[i]] += 1.0 / k;
      acc += weight * geometric_mixture_exponent(w, v).as_double();
    }
    int pos = k - 1;
    while (pos >= 0 && tuple[pos] + 1 == w.nx()) tuple[pos--] = 0;
    if (pos < 0) break;
    ++tuple[pos];
  }
  return acc;
}

}  // namespace

TEST_CASE("Bhattacharyya matrix closed cases") {
  double q = 0.1;
  BhattMatrix a = bhattacharyya_matrix(make_bsc(q));
  CHECK(a(0, 0) == 0.0);
  CHECK(a(1, 1) == 0.0);
  CHECK(a(0, 1) == Approx(-std::log(2.0 * std::sqrt(q * (1.0 - q)))).margin(1e-14));
  CHECK(a(0, 1) == a(1, 0));

  BhattMatrix id = bhattacharyya_matrix(identity2());
  CHECK(std::isinf(id(0, 1)));

  BhattMatrix c = bhattacharyya_matrix(constant2());
  CHECK(c(0, 1) == Approx(0.0).margin(1e-14));
}

TEST_CASE("unassisted zero-rate exponent closed cases") {
  CertifiedValue bsc = unassisted_zero_rate(make_bsc(0.1));
  CHECK(bsc.value == Approx(0.255413).margin(1e-6));
  CHECK(bsc.value == Approx(0.25 * std::log(1.0 / (4.0 * 0.09))).margin(1e-12));
  CHECK(bsc.argmax_p[0] == Approx(0.5).margin(1e-12));

  for (double q : {0.2, 0.5}) {
    CertifiedValue bec = unassisted_zero_rate(make_bec(q));
    CHECK(bec.value == Approx(-0.5 * std::log(q)).margin(1e-10));
  }

  CHECK(unassisted_zero_rate(identity2()).is_infinite());
}

TEST_CASE("geometric mixture exponent: monotone and nonnegative on the simplex") {
  std::mt19937_64 rng(kDefaultSeed);
  for (int t = 0; t < 64; ++t) {
    Channel w = testutil::random_channel(rng, 3, 3, t % 2 ? 0.0 : 0.05);
    std::vector<double> u(3), v(3);
    for (int i = 0; i < 3; ++i) {
      u[i] = testutil::u01(rng);
      v[i] = u[i] + (1.0 - u[i]) * testutil::u01(rng);  // v >= u entrywise
    }
    ExtReal fu = geometric_mixture_exponent(w, u);
    ExtReal fv = geometric_mixture_exponent(w, v);
    if (fu.is_finite() && fv.is_finite()) CHECK(fv.as_double() >= fu.as_double() - 1e-12);
    else CHECK((fv.is_infinite() || fu.is_finite()));  // v kills at least what u kills

    auto s = testutil::random_simplex(rng, 3);
    ExtReal fs = geometric_mixture_exponent(w, s);
    if (fs.is_finite()) CHECK(fs.as_double() >= -1e-12);
  }
}

TEST_CASE("ell_kq closed cases") {
  Channel w = make_bsc(0.1);
  Dist u2 = make_dist({0.5, 0.5}, w.x_alphabet());
  CHECK(ell_kq(EllSpec::uniform(1), u2, w).as_double() == Approx(0.0).margin(1e-14));

  BhattMatrix a = bhattacharyya_matrix(w);
  CHECK(ell_kq(EllSpec::uniform(2), u2, w).as_double() ==
        Approx(0.5 * a(0, 1)).margin(1e-12));
  CHECK(ell_kq(EllSpec::uniform(2), u2, w).as_double() == Approx(0.255413).margin(1e-6));

  // k = 3: 0.75 * f(2/3, 1/3) against the direct triple sum
  double f23 = -std::log(std::pow(0.9, 2.0 / 3.0) * std::pow(0.1, 1.0 / 3.0) +
                         std::pow(0.1, 2.0 / 3.0) * std::pow(0.9, 1.0 / 3.0));
  CHECK(ell_kq(EllSpec::uniform(3), u2, w).as_double() ==
        Approx(0.75 * f23).margin(1e-12));
  CHECK(ell_kq(EllSpec::uniform(3), u2, w).as_double() == Approx(0.33392).margin(1e-5));
  CHECK(ell_kq(EllSpec::uniform(3), u2, w).as_double() ==
        Approx(ell_direct(3, u2, w)).margin(1e-12));
}

TEST_CASE("type-class evaluation equals direct enumeration") {
  std::mt19937_64 rng(kDefaultSeed + 1);
  for (int t = 0; t < 8; ++t) {
    std::size_t nx = 2 + (t % 2);
    Channel w = testutil::random_channel(rng, nx, 3, 0.02);
    Dist p = testutil::random_dist(rng, nx, 0.01);
    for (int k : {2, 5, 8}) {
      CHECK(ell_kq(EllSpec::uniform(k), p, w).as_double() ==
            Approx(ell_direct(k, p, w)).margin(1e-12));
    }
  }
}

TEST_CASE("EllSpec validation and enumeration guard") {
  CHECK_THROWS_AS(EllSpec(2, {0.7, 0.2}), NotNormalized);
  CHECK_THROWS_AS(EllSpec(2, {1.5, -0.5}), NegativeWeight);
  Channel w = make_bsc(0.1);
  Dist u2 = make_dist({0.5, 0.5}, w.x_alphabet());
  std::vector<double> q(30, 1.0 / 30.0);
  q[0] += 0.5 / 30.0;
  q[1] -= 0.5 / 30.0;  // non-uniform, k = 30 => 2^30 tuples
  CHECK_THROWS_AS(ell_kq(EllSpec(30, q), u2, w), TooLarge);
}

TEST_CASE("ell is dominated by the umlaut information") {
  std::mt19937_64 rng(kDefaultSeed + 2);
  for (int t = 0; t < 12; ++t) {
    Channel w = testutil::random_channel(rng, 2, 3, 0.02);
    Dist p = testutil::random_dist(rng, 2, 0.05);
    double u = umlaut_info(joint_from_channel(w, p)).value.as_double();
    for (int k : {2, 4, 8, 16})
      CHECK(ell_kq(EllSpec::uniform(k), p, w).as_double() <= u + 1e-10);
  }
}

TEST_CASE("ell converges to the umlaut information with a quantitative gap") {
  // BSC(0.2) at the uniform input
  Channel w = make_bsc(0.2);
  Dist p = make_dist({0.5, 0.5}, w.x_alphabet());
  double u = umlaut_info(joint_from_channel(w, p)).value.as_double();
  double prev_gap = std::numeric_limits<double>::infinity();
  double gap64 = 0.0;
  for (int k : {2, 4, 8, 16, 32, 64}) {
    double ell = ell_kq(EllSpec::uniform(k), p, w).as_double();
    double gap = u - ell;
    CHECK(ell <= u + 1e-12);
    CHECK(gap <= prev_gap + 1e-12);
    prev_gap = gap;
    if (k == 64) gap64 = gap;
  }
  GapBound gb = list_gap_bound(63, w, p);
  CHECK(gap64 <= gb.bound);
}

TEST_CASE("list decoding ladder on the BSC") {
  Channel w = make_bsc(0.1);
  double tol = 1e-8;
  CertifiedValue e1 = list_zero_rate(1, w, tol);
  CertifiedValue un = unassisted_zero_rate(w, tol);
  CHECK(e1.value == Approx(un.value).margin(1e-7));

  CertifiedValue e2 = list_zero_rate(2, w, tol);
  double u = channel_umlaut(w, tol).value;
  CHECK(e1.value <= e2.value + 1e-9);
  CHECK(e2.value <= u + 1e-9);
  CHECK(e2.value == Approx(0.333923).margin(1e-5));

  for (int l : {1, 3}) CHECK(list_zero_rate(l, constant2(), tol).value == Approx(0.0).margin(1e-10));
  CHECK(list_zero_rate(1, identity2(), tol).is_infinite());
}

TEST_CASE("list gap bound behaviour") {
  Channel w = make_bsc(0.1);
  Dist pbar = make_dist({0.5, 0.5}, w.x_alphabet());
  GapBound g1 = list_gap_bound(1, w, pbar);
  CHECK(g1.epsilon == 0.5);  // min rule caps epsilon
  CHECK(g1.bound >= 0.0);
  CHECK(g1.w_min == Approx(0.1).margin(1e-15));
  CHECK(g1.pbar_min == Approx(0.5).margin(1e-15));

  double prev = std::numeric_limits<double>::infinity();
  for (int l : {10, 100, 1000, 10000}) {
    GapBound g = list_gap_bound(l, w, pbar);
    CHECK(g.bound <= prev + 1e-12);
    prev = g.bound;
  }

  double u = channel_umlaut(w, 1e-9).value;
  double e100 = list_zero_rate(100, w, 1e-8).value;
  CHECK(u - e100 <= list_gap_bound(100, w, pbar).bound);
}

TEST_CASE("DNN bound equals the exact quadratic maximum at small sizes") {
  for (double q : {0.1, 0.3}) {
    Channel w = make_bsc(q);
    BhattMatrix a = bhattacharyya_matrix(w);
    CHECK(dnn_bound(w, 1e-9) == Approx(0.5 * a(0, 1)).margin(1e-6));
  }
  CHECK(std::isinf(dnn_bound(identity2())));

  std::mt19937_64 rng(kDefaultSeed + 3);
  for (int t = 0; t < 6; ++t) {
    Channel w = testutil::random_channel(rng, 3, 3, 0.02);
    CertifiedValue r = unassisted_zero_rate(w, 1e-8);
    CHECK(r.upper - r.lower <= 1e-5);  // CP = DNN at |X| <= 4
    // rank-one feasibility: any p gives p^T A p <= dnn
    BhattMatrix a = bhattacharyya_matrix(w);
    for (int s = 0; s < 8; ++s) {
      auto p = testutil::random_simplex(rng, 3);
      double quad = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) quad += p[i] * a(i, j) * p[j];
      CHECK(quad <= r.upper + 1e-6);
    }
  }
}
