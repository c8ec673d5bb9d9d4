#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "test_util.hpp"
#include "umlaut/io.hpp"

using namespace umlaut;
using Catch::Approx;

TEST_CASE("17-digit formatting round-trips doubles exactly") {
  std::mt19937_64 rng(kDefaultSeed);
  for (int t = 0; t < 200; ++t) {
    double v = std::ldexp(testutil::u01(rng) - 0.5, static_cast<int>(rng() % 40) - 20);
    std::string s = io::fmt17(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(io::fmt17(std::numeric_limits<double>::infinity()) == "\"inf\"");
}

TEST_CASE("dist serialisation round-trips bit-exactly") {
  std::mt19937_64 rng(kDefaultSeed + 1);
  for (int t = 0; t < 16; ++t) {
    Dist d = testutil::random_dist(rng, 4);
    Dist back = io::parse_dist(nlohmann::json::parse(io::serialize_dist(d)));
    CHECK(back.alphabet() == d.alphabet());
    for (int i = 0; i < 4; ++i) CHECK(back[i] == d[i]);
  }
}

TEST_CASE("channel and joint serialisation round-trip") {
  std::mt19937_64 rng(kDefaultSeed + 2);
  Channel w = testutil::random_channel(rng, 3, 2, 0.01);
  Channel wb = io::parse_channel(nlohmann::json::parse(io::serialize_channel(w)));
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t y = 0; y < 2; ++y) CHECK(wb(y, x) == w(y, x));

  JointDist j = testutil::random_joint(rng, 2, 3, 0.01);
  JointDist jb = io::parse_joint(nlohmann::json::parse(io::serialize_joint(j)));
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 3; ++y) CHECK(jb(x, y) == j(x, y));
}

TEST_CASE("gaussian schemas parse") {
  auto j = nlohmann::json::parse(R"({
    "mean": [0, 0], "cov": [[1.0, 0.5], [0.5, 1.0]], "nx": 1, "ny": 1
  })");
  GaussianJoint g = io::parse_gaussian_joint(j);
  CHECK(g.v(0, 1) == 0.5);

  auto c = nlohmann::json::parse(R"({
    "H": [[0.5]], "m": [0.0], "V": [[0.75]], "C": [[1.0]]
  })");
  GaussianChannelSpec spec = io::parse_gaussian_channel(c);
  CHECK(spec.h(0, 0) == 0.5);
}

TEST_CASE("malformed inputs are rejected") {
  CHECK_THROWS(io::parse_dist(nlohmann::json::parse(R"({"weights": [1.0]})")));
  CHECK_THROWS(io::parse_channel(nlohmann::json::parse(
      R"({"inputs": ["0"], "outputs": ["0","1"], "matrix": [[0.6, 0.3]]})")));
}
