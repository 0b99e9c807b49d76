#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "ppolab/rng.hpp"

using ppolab::Rng;

TEST_CASE("same seed reproduces the sequence") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("doubles live in [0,1) and differ across draws") {
  Rng r(7);
  double prev = -1.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = r.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(u != prev);
    prev = u;
  }
}

TEST_CASE("gaussian draws have unit scale") {
  Rng r(3);
  const int n = 100000;
  double sum = 0, sumsq = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.next_gaussian();
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("fork does not consume parent draws and children are distinct") {
  Rng parent(99);
  const std::uint64_t before = parent.state();
  Rng c0 = parent.fork(0);
  Rng c1 = parent.fork(1);
  CHECK(parent.state() == before);
  CHECK(c0.state() != c1.state());
  CHECK(c0.next_u64() != c1.next_u64());

  std::set<std::uint64_t> states;
  for (std::uint64_t k = 0; k < 10000; ++k) states.insert(parent.fork(k).state());
  CHECK(states.size() == 10000);
}

TEST_CASE("two-level forks used for trial/agent seeds never collide") {
  Rng root(123);
  std::set<std::uint64_t> states;
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    Rng t = root.fork(trial);
    for (std::uint64_t agent = 0; agent < 16; ++agent) states.insert(t.fork(agent).state());
  }
  CHECK(states.size() == 200 * 16);
}

TEST_CASE("below(n) is bounded and roughly uniform") {
  Rng r(11);
  const std::uint64_t n = 17;
  std::vector<int> counts(n, 0);
  const int draws = 170000;
  for (int i = 0; i < draws; ++i) {
    const std::uint64_t v = r.below(n);
    REQUIRE(v < n);
    counts[v]++;
  }
  const double expected = double(draws) / double(n);
  double chi2 = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double d = counts[i] - expected;
    chi2 += d * d / expected;
  }
  // 99.9% quantile of chi-square with 16 dof is 39.25
  CHECK(chi2 < 39.25);
}

TEST_CASE("shuffle permutes deterministically") {
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7};
  Rng a(5);
  a.shuffle(v);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});

  std::vector<int> w{0, 1, 2, 3, 4, 5, 6, 7};
  Rng b(5);
  b.shuffle(w);
  CHECK(v == w);
}

TEST_CASE("state round-trips") {
  Rng a(1);
  a.next_u64();
  a.next_u64();
  Rng b(0);
  b.set_state(a.state());
  CHECK(a.next_u64() == b.next_u64());
}
