#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "umlaut/ns_coding.hpp"

using namespace umlaut;
using Catch::Approx;

namespace {

Channel noiseless2() {
  return make_channel({{1.0, 0.0}, {0.0, 1.0}}, Alphabet::indexed(2), Alphabet::indexed(2));
}

Channel constant2() {
  return make_channel({{0.4, 0.6}, {0.4, 0.6}}, Alphabet::indexed(2), Alphabet::indexed(2));
}

void check_lp_invariants(const NsLpResult& r, const Channel& w) {
  double obj = 0.0;
  for (std::size_t y = 0; y < w.ny(); ++y) {
    double col = 0.0;
    for (std::size_t x = 0; x < w.nx(); ++x) {
      CHECK(r.r[x][y] >= -1e-9);
      CHECK(r.r[x][y] <= r.p[x] + 1e-9);
      col += r.r[x][y];
      obj += w(y, x) * r.r[x][y];
    }
    CHECK(col <= 1.0 / r.message_count + 1e-9);
  }
  CHECK(r.eps_ns == Approx(1.0 - obj).margin(1e-9));
}

}  // namespace

TEST_CASE("ns error LP closed cases") {
  NsLpResult perfect = ns_error_lp(2, noiseless2());
  CHECK(perfect.eps_ns == Approx(0.0).margin(1e-9));
  check_lp_invariants(perfect, noiseless2());

  for (int m : {2, 3, 5}) {
    NsLpResult r = ns_error_lp(m, constant2());
    CHECK(r.eps_ns == Approx(1.0 - 1.0 / m).margin(1e-9));
    check_lp_invariants(r, constant2());
  }
}

TEST_CASE("ns error is monotone in message count and under degradation") {
  std::mt19937_64 rng(kDefaultSeed);
  Channel w = testutil::random_channel(rng, 3, 3, 0.02);
  double prev = -1.0;
  for (int m : {2, 3, 4, 6}) {
    double e = ns_error_lp(m, w).eps_ns;
    CHECK(e >= prev - 1e-9);
    prev = e;
  }
  for (int t = 0; t < 6; ++t) {
    Channel base = testutil::random_channel(rng, 2, 3, 0.02);
    Channel post = testutil::random_channel(rng, 3, 3, 0.0);
    // degraded(y'|x) = sum_y post(y'|y) base(y|x)
    std::vector<double> rows(base.nx() * post.ny(), 0.0);
    for (std::size_t x = 0; x < base.nx(); ++x)
      for (std::size_t z = 0; z < post.ny(); ++z)
        for (std::size_t y = 0; y < base.ny(); ++y)
          rows[x * post.ny() + z] += post(z, y) * base(y, x);
    Channel degraded(base.x_alphabet(), post.y_alphabet(), std::move(rows));
    CHECK(ns_error_lp(3, degraded).eps_ns >= ns_error_lp(3, base).eps_ns - 1e-9);
  }
}

TEST_CASE("ns error LP is invariant under input permutation on the BSC") {
  Channel w = make_bsc(0.15);
  Channel swapped = make_channel({{0.15, 0.85}, {0.85, 0.15}}, Alphabet::indexed(2),
                                 Alphabet::indexed(2));
  CHECK(ns_error_lp(2, w).eps_ns == Approx(ns_error_lp(2, swapped).eps_ns).margin(1e-9));
}

TEST_CASE("extra parallel channel never hurts") {
  std::mt19937_64 rng(kDefaultSeed + 1);
  for (int t = 0; t < 4; ++t) {
    Channel w1 = testutil::random_channel(rng, 2, 2, 0.05);
    Channel w2 = testutil::random_channel(rng, 2, 2, 0.05);
    double single = -std::log(ns_error_lp(3, w1).eps_ns);
    double pair = -std::log(ns_error_lp(3, product_channel(w1, w2)).eps_ns);
    CHECK(pair >= single - 1e-9);
  }
}

TEST_CASE("meta-converse saddle equals the LP route") {
  std::mt19937_64 rng(kDefaultSeed + 2);
  for (int t = 0; t < 4; ++t) {
    for (auto [nx, ny] : {std::pair<int, int>{2, 2}, {2, 3}, {3, 3}}) {
      Channel w = testutil::random_channel(rng, nx, ny, 0.02);
      for (int m : {2, 3, 5}) {
        double lp = -std::log(ns_error_lp(m, w).eps_ns);
        double saddle = metaconverse_saddle(m, w, 1e-9);
        CHECK(saddle == Approx(lp).margin(1e-6));
      }
    }
  }
}

TEST_CASE("meta-converse saddle closed cases") {
  CHECK(std::isinf(metaconverse_saddle(2, noiseless2())));
  for (int m : {2, 5})
    CHECK(metaconverse_saddle(m, constant2()) ==
          Approx(-std::log(1.0 - 1.0 / m)).margin(1e-8));
  CHECK_THROWS_AS(metaconverse_saddle(1, constant2()), ProbError);
}

TEST_CASE("ns sandwich brackets the finite-n LP exponents") {
  Channel w = make_bsc(0.1);
  double u = channel_umlaut(w, 1e-10).value;
  for (int n : {1, 2, 3}) {
    auto [lo, hi] = ns_sandwich(2, n, w, 1.0 - 0.05, 1.0 + 0.05);
    double lp = -std::log(ns_error_lp(2, channel_power(w, n)).eps_ns) / n;
    CHECK(lo <= lp + 1e-8);
    CHECK(lp <= hi + 1e-8);
  }
  // single-letter ends bracket U(W) tightly near alpha = 1
  auto [lo, hi] = ns_sandwich(2, 1000000, w, 1.0 - 1e-3, 1.0 + 1e-3);
  CHECK(std::abs(lo - u) <= 2e-2);
  CHECK(std::abs(hi - u) <= 2e-2);
  CHECK(lo <= u + 1e-9);
  CHECK(u <= hi + 1e-9);
}

TEST_CASE("ns sandwich degenerates to zero on constant channels") {
  // U_alpha = 0, so both sides are pure 1/n correction terms
  Channel w = constant2();
  auto [lo, hi] = ns_sandwich(2, 2000, w, 0.9, 1.1);
  CHECK(lo == Approx(0.0).margin(0.02));
  CHECK(hi == Approx(0.0).margin(0.02));
  CHECK(lo <= 1e-12);
  CHECK(hi >= -1e-12);
}
