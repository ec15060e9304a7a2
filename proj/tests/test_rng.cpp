#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "mixguide/rng.hpp"

using namespace mixguide;

TEST_SUITE("rng") {

TEST_CASE("gaussian sample moments at law-of-large-numbers tolerance") {
  RandomStream rng(42);
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double z = rng.next_gaussian();
    sum += z;
    sumsq += z * z;
  }
  double mean = sum / n;
  double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);       // 4/sqrt(n) = 0.0126
  CHECK(std::abs(var - 1.0) < 0.02);  // 4*sqrt(2/n) = 0.0179
}

TEST_CASE("fixed seed reproduces the exact sequence") {
  RandomStream a(7, 3), b(7, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  RandomStream c(7, 3), d(7, 3);
  for (int i = 0; i < 100; ++i) {
    double x = c.next_gaussian(), y = d.next_gaussian();
    CHECK(std::memcmp(&x, &y, sizeof x) == 0);
  }
}

TEST_CASE("streams of one seed are distinct") {
  RandomStream a(7, 0), b(7, 1), c(8, 0);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 64; ++i) {
    std::uint64_t x = a.next_u64(), y = b.next_u64(), z = c.next_u64();
    same_ab += x == y;
    same_ac += x == z;
  }
  CHECK(same_ab == 0);
  CHECK(same_ac == 0);
}

TEST_CASE("unit draws stay in the half-open interval") {
  RandomStream rng(1);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("gaussian tail mass is two sided") {
  RandomStream rng(3);
  int above = 0, below = 0;
  for (int i = 0; i < 20000; ++i) {
    double z = rng.next_gaussian();
    above += z > 1.0;
    below += z < -1.0;
  }
  // P(|Z| > 1) each side ~ 0.1587; allow generous binomial slack
  CHECK(above > 2800);
  CHECK(above < 3600);
  CHECK(below > 2800);
  CHECK(below < 3600);
}

}  // TEST_SUITE
