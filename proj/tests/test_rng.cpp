#include "scucb/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

using namespace scucb;

TEST_CASE("named streams are reproducible and distinct") {
  CHECK(derive_seed(7, "policy") == derive_seed(7, "policy"));
  CHECK(derive_seed(7, "policy") != derive_seed(7, "oracle"));
  CHECK(derive_seed(7, "arm-reward", 0) != derive_seed(7, "arm-reward", 1));
  CHECK(derive_seed(7, "policy") != derive_seed(8, "policy"));

  Rng a = make_stream(42, "instance");
  Rng b = make_stream(42, "instance");
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
}

TEST_CASE("fnv1a64 matches published test vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("uniform01 stays in [0,1) and has the right moments") {
  Rng rng = make_stream(1, "test");
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sq += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sq / n - (sum / n) * (sum / n) == doctest::Approx(1.0 / 12).epsilon(0.02));
}

TEST_CASE("gamma and beta samplers match their means") {
  Rng rng = make_stream(2, "test");
  const int n = 100000;
  for (double shape : {0.3, 1.0, 4.5}) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += gamma_sample(rng, shape);
    CHECK(sum / n == doctest::Approx(shape).epsilon(0.03));
  }
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = beta_sample(rng, 2.0, 5.0);
    REQUIRE(x >= 0.0);
    REQUIRE(x <= 1.0);
    sum += x;
  }
  CHECK(sum / n == doctest::Approx(2.0 / 7.0).epsilon(0.02));
}

TEST_CASE("standard_normal has zero mean and unit variance") {
  Rng rng = make_stream(3, "test");
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(rng);
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("uniform_index covers its range evenly") {
  Rng rng = make_stream(4, "test");
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto k = uniform_index(rng, 7);
    REQUIRE(k < 7);
    ++counts[k];
  }
  for (int c : counts) CHECK(std::abs(c - n / 7) < 400);
}
