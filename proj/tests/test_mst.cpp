#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <tuple>
#include <limits>
#include <numeric>
#include <vector>

#include "rankcal/errors.hpp"
#include "rankcal/mst.hpp"
#include "rankcal/random.hpp"

using namespace rankcal;

namespace {

double dist(const std::vector<double>& p, std::size_t d, std::size_t a, std::size_t b) {
  double s = 0;
  for (std::size_t k = 0; k < d; ++k) s += (p[a * d + k] - p[b * d + k]) * (p[a * d + k] - p[b * d + k]);
  return std::sqrt(s);
}

// Minimum over all n^(n-2) labelled trees, decoded from Pruefer sequences.
double cayley_minimum(const std::vector<double>& p, std::size_t d) {
  const std::size_t n = p.size() / d;
  if (n == 2) return dist(p, d, 0, 1);
  std::vector<std::size_t> seq(n - 2, 0);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    std::vector<int> degree(n, 1);
    for (auto v : seq) ++degree[v];
    double len = 0;
    for (auto v : seq) {
      std::size_t leaf = 0;
      while (degree[leaf] != 1) ++leaf;
      len += dist(p, d, leaf, v);
      --degree[leaf];
      --degree[v];
    }
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i)
      if (degree[i] == 1) rest.push_back(i);
    len += dist(p, d, rest[0], rest[1]);
    best = std::min(best, len);
    std::size_t pos = 0;
    while (pos < seq.size() && ++seq[pos] == n) seq[pos++] = 0;
    if (pos == seq.size()) return best;
  }
}

// Kruskal with union-find: an independent greedy construction.
double kruskal(const std::vector<double>& p, std::size_t d) {
  const std::size_t n = p.size() / d;
  std::vector<std::tuple<double, std::size_t, std::size_t>> edges;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) edges.emplace_back(dist(p, d, a, b), a, b);
  std::sort(edges.begin(), edges.end());
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  double total = 0;
  for (const auto& [w, a, b] : edges) {
    const auto ra = find(a), rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      total += w;
    }
  }
  return total;
}

std::vector<double> random_points(RandomSource& rng, std::size_t n, std::size_t d) {
  std::vector<double> p(n * d);
  for (auto& x : p) x = rng.normal();
  return p;
}

}  // namespace

TEST(Mst, Examples) {
  EXPECT_DOUBLE_EQ(mst_length(std::vector<double>{0, 1, 10}, 1), 10.0);
  EXPECT_DOUBLE_EQ(mst_length(std::vector<double>{0, 0, 1, 0, 0, 1, 1, 1}, 2), 3.0);
  EXPECT_DOUBLE_EQ(mst_length(std::vector<double>{2, 3, 2, 3}, 2), 0.0);
  EXPECT_THROW(mst_length(std::vector<double>{1, 2}, 2), InvalidInput);
}

TEST(Mst, RemovalsExamples) {
  const DistanceCache cache(std::vector<double>{0, 1, 10}, 1);
  const auto r = mst_length_all_removals(cache);
  EXPECT_EQ(r[0], 9.0);
  EXPECT_EQ(r[1], 10.0);
  EXPECT_EQ(r[2], 1.0);
  const auto zero = mst_length_all_removals(DistanceCache(std::vector<double>(12, 1.5), 3));
  for (auto v : zero.values()) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(mst_length_all_removals(DistanceCache(std::vector<double>{0, 1}, 1)), InsufficientPoints);
}

TEST(Mst, MatchesCayleyEnumeration) {
  RandomSource rng(21, 0);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 2 + rng.uniform_index(5), d = 1 + rng.uniform_index(3);
    const auto p = random_points(rng, n, d);
    const double brute = cayley_minimum(p, d);
    EXPECT_NEAR(mst_length(p, d), brute, 1e-12 * brute);
  }
}

TEST(Mst, RemovalsMatchCayleyForFivePoints) {
  RandomSource rng(22, 0);
  const auto p = random_points(rng, 5, 2);
  const auto r = mst_length_all_removals(DistanceCache(p, 2));
  for (std::size_t i = 0; i < 5; ++i) {
    std::vector<double> rest;
    for (std::size_t j = 0; j < 5; ++j)
      if (j != i) rest.insert(rest.end(), p.begin() + j * 2, p.begin() + j * 2 + 2);
    EXPECT_NEAR(r[i], cayley_minimum(rest, 2), 1e-12 * r[i]);
  }
}

TEST(Mst, AgreesWithKruskal) {
  RandomSource rng(23, 0);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng.uniform_index(40), d = 1 + rng.uniform_index(6);
    const auto p = random_points(rng, n, d);
    const double k = kruskal(p, d);
    EXPECT_NEAR(mst_length(p, d), k, 1e-12 * (1 + k));
  }
}

TEST(Mst, RemovalsEqualFromScratchExactly) {
  RandomSource rng(24, 0);
  const auto p = random_points(rng, 6, 3);
  const DistanceCache cache(p, 3);
  const auto r = mst_length_all_removals(cache);
  for (std::size_t i = 0; i < 6; ++i) {
    std::vector<double> rest;
    for (std::size_t j = 0; j < 6; ++j)
      if (j != i) rest.insert(rest.end(), p.begin() + j * 3, p.begin() + j * 3 + 3);
    EXPECT_EQ(r[i], mst_length(rest, 3));
    EXPECT_EQ(r[i], mst_length(cache, i));
  }
}

TEST(DistanceCache, SymmetricWithTriangleInequality) {
  RandomSource rng(25, 0);
  const auto p = random_points(rng, 10, 4);
  const DistanceCache c(p, 4);
  for (std::size_t a = 0; a < 10; ++a) {
    EXPECT_EQ(c(a, a), 0.0);
    for (std::size_t b = 0; b < 10; ++b) {
      EXPECT_EQ(c(a, b), c(b, a));
      for (std::size_t e = 0; e < 10; ++e) EXPECT_LE(c(a, b), (c(a, e) + c(e, b)) * (1 + 1e-9));
    }
  }
}

TEST(Mst, IsometryAndScaling) {
  RandomSource rng(26, 0);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 3 + rng.uniform_index(20);
    auto p = random_points(rng, n, 2);
    const double len = mst_length(p, 2);
    const double angle = rng.uniform() * 6.283185307179586;
    std::vector<double> q(p.size()), s(p.size());
    for (std::size_t i = 0; i < n; ++i) {
      const double x = p[2 * i], y = p[2 * i + 1];
      q[2 * i] = std::cos(angle) * x - std::sin(angle) * y + 3.5;
      q[2 * i + 1] = std::sin(angle) * x + std::cos(angle) * y - 1.25;
      s[2 * i] = 2.5 * x;
      s[2 * i + 1] = 2.5 * y;
    }
    EXPECT_LT(std::abs(mst_length(q, 2) - len), 1e-9 * (1 + len));
    EXPECT_NEAR(mst_length(s, 2), 2.5 * len, 1e-12 * 2.5 * len);
  }
}

TEST(Mst, AddingPointBound) {
  RandomSource rng(27, 0);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 3 + rng.uniform_index(10);
    auto p = random_points(rng, n, 3);
    const double before = mst_length(p, 3);
    double longest = 0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) longest = std::max(longest, dist(p, 3, a, b));
    for (int k = 0; k < 3; ++k) p.push_back(rng.normal());
    EXPECT_GE(mst_length(p, 3), before - longest);
  }
}
