#include "marginrec/instances.hpp"
#include "marginrec/margins.hpp"
#include "marginrec/sampling/random.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace marginrec;

namespace {

std::vector<Pseudometric> euclid(std::size_t m, int k) {
  return std::vector<Pseudometric>(static_cast<std::size_t>(k), Pseudometric::euclidean(m));
}

// Disk of diameter 1 around c: a boundary ring plus random interior points.
std::vector<Point> disk(double cx, double cy, RandomSource& rng) {
  std::vector<Point> out;
  for (int i = 0; i < 24; ++i) {
    double th = 2 * 3.141592653589793 * i / 24;
    Point p(2);
    p << cx + 0.5 * std::cos(th), cy + 0.5 * std::sin(th);
    out.push_back(p);
  }
  for (int i = 0; i < 40; ++i) {
    Point p(2);
    double r = 0.5 * std::sqrt(rng.uniform01()), th = rng.uniform(0, 6.283185307179586);
    p << cx + r * std::cos(th), cy + r * std::sin(th);
    out.push_back(p);
  }
  return out;
}

// Instance-restricted packing by plain enumeration: centres and radii from X,
// every subset of the ball checked for pairwise separation.
std::size_t packing_by_enumeration(const PointSet& x, double gamma) {
  const std::size_t n = x.size();
  std::size_t best = n ? 1 : 0;
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t q = 0; q < n; ++q) {
      const double r = (x.point(c) - x.point(q)).norm();
      if (r <= 0) continue;
      std::vector<std::size_t> ball;
      for (std::size_t i = 0; i < n; ++i)
        if ((x.point(c) - x.point(i)).norm() <= r) ball.push_back(i);
      for (std::uint32_t mask = 1; mask < (1u << ball.size()); ++mask) {
        bool ok = true;
        for (std::size_t a = 0; a < ball.size() && ok; ++a)
          for (std::size_t b = a + 1; b < ball.size() && ok; ++b)
            if ((mask >> a & 1) && (mask >> b & 1) &&
                !((x.point(ball[a]) - x.point(ball[b])).norm() > gamma * r))
              ok = false;
        if (ok) best = std::max<std::size_t>(best, static_cast<std::size_t>(__builtin_popcount(mask)));
      }
    }
  return best;
}

PointSet uniform_cube(RandomSource& rng, std::size_t m, std::size_t n) {
  Matrix v(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < v.cols(); ++j)
    for (Eigen::Index i = 0; i < v.rows(); ++i) v(i, j) = rng.uniform01();
  return PointSet(v);
}

}  // namespace

TEST(OvaMargin, SingletonClustersAreInfinite) {
  PointSet x = PointSet::from_rows({{0, 0}, {1, 1}});
  auto r = ova_margin(x, Clustering({1, 2}, 2), euclid(2, 2));
  EXPECT_TRUE(std::isinf(r.per_cluster[0]));
  EXPECT_TRUE(std::isinf(r.per_cluster[1]));
}

TEST(OvaMargin, FigureOneInstanceIsInfinite) {
  RandomSource rng(1);
  Instance inst = gen_svm_vs_ova(0.01, 1.0, rng);
  auto r = ova_margin(inst.points, inst.truth, inst.metrics);
  EXPECT_TRUE(std::isinf(r.per_cluster[0]));
  EXPECT_TRUE(std::isinf(r.per_cluster[1]));
  // the cluster-1 metric sees C1 as a single point, at distance eta from C2
  EXPECT_EQ(diameter(inst.metrics[0], inst.points, inst.truth.members(1)), 0.0);
  EXPECT_NEAR(set_distance(inst.metrics[0], inst.points, inst.truth.members(2), inst.truth.members(1)),
              0.01, 1e-15);
}

TEST(OvaMargin, LineExample) {
  PointSet x = PointSet::from_rows({{0}, {1}, {3}});
  auto r = ova_margin(x, Clustering({1, 1, 2}, 2), euclid(1, 2));
  EXPECT_DOUBLE_EQ(r.per_cluster[0], 2.0);
  EXPECT_TRUE(std::isinf(r.per_cluster[1]));
  EXPECT_DOUBLE_EQ(r.min, 2.0);
}

TEST(OvaMargin, ConventionsAndErrors) {
  PointSet x = PointSet::from_rows({{0}, {0}, {1}});
  // a point shared between clusters: distance 0 gives ratio 0
  auto r = ova_margin(x, Clustering({1, 2, 2}, 3), euclid(1, 3));
  EXPECT_EQ(r.per_cluster[0], 0.0);
  EXPECT_TRUE(std::isinf(r.per_cluster[2]));  // empty cluster
  EXPECT_THROW(ova_margin(x, Clustering({1, 2, 2}, 3), euclid(1, 2)), InvalidInput);
}

TEST(ConvexHullMargin, DisjointSingletonsAnyGamma) {
  PointSet x = PointSet::from_rows({{0, 0}, {1, 0}, {5, 5}});
  for (double g : {0.1, 1.0, 100.0, 1e6})
    EXPECT_TRUE(verify_convex_hull_margin(x, Clustering({1, 2, 3}, 3), euclid(2, 3), g).satisfied);
}

TEST(ConvexHullMargin, TwoDisksAtDistanceFour) {
  RandomSource rng(2);
  auto a = disk(0, 0, rng), b = disk(4, 0, rng);
  std::vector<Point> pts = a;
  pts.insert(pts.end(), b.begin(), b.end());
  std::vector<ClusterId> labels(a.size(), 1);
  labels.resize(pts.size(), 2);
  PointSet x(2, pts);
  Clustering c(labels, 2);
  auto yes = verify_convex_hull_margin(x, c, euclid(2, 2), 1.0);
  EXPECT_TRUE(yes.satisfied);
  for (double rt : yes.ratio) EXPECT_GE(rt, 3.0 - 1e-9);
  EXPECT_FALSE(verify_convex_hull_margin(x, c, euclid(2, 2), 4.0).satisfied);
}

TEST(ConvexHullMargin, MonotoneInGammaAndImpliesOva) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RandomSource rng(seed);
    Instance inst = gen_convex_margin(2, 3, 90, 0.5, rng);
    bool prev = true;
    for (double g : {0.1, 0.3, 0.5, 0.6, 1.0, 2.0, 4.0}) {
      bool now = verify_convex_hull_margin(inst.points, inst.truth, inst.metrics, g).satisfied;
      if (!prev) EXPECT_FALSE(now);
      prev = now;
    }
    auto hull = verify_convex_hull_margin(inst.points, inst.truth, inst.metrics, 0.5);
    auto ova = ova_margin(inst.points, inst.truth, inst.metrics);
    EXPECT_TRUE(hull.satisfied);
    EXPECT_GE(ova.min, hull.min_ratio - 1e-9);
    EXPECT_GE(ova.min, 0.5);
  }
}

TEST(ConvexHullMargin, LinearSeparationImpliesHullMargin) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomSource rng(seed);
    const double w = 0.2 + rng.uniform01();
    std::vector<Point> pts;
    std::vector<ClusterId> labels;
    for (int i = 0; i < 40; ++i) {
      Point p(2);
      bool right = i % 2;
      p << (right ? w + rng.uniform01() : -rng.uniform01()), rng.uniform(0, 2);
      pts.push_back(p);
      labels.push_back(right ? 2 : 1);
    }
    PointSet x(2, pts);
    // separation w normalised by the diameter of the whole set
    const double gamma = w / diameter(Pseudometric::euclidean(2), x) / 1.01;
    EXPECT_TRUE(verify_convex_hull_margin(x, Clustering(labels, 2), euclid(2, 2), gamma).satisfied);
  }
}

TEST(CenterProximity, Examples) {
  auto d = Pseudometric::euclidean(1);
  PointSet at = PointSet::from_rows({{0}, {10}});
  EXPECT_TRUE(std::isinf(center_proximity_alpha(at, Clustering({1, 2}, 2), {Point::Constant(1, 0), Point::Constant(1, 10)}, d)));
  PointSet near = PointSet::from_rows({{1}, {9}});
  EXPECT_DOUBLE_EQ(center_proximity_alpha(near, Clustering({1, 2}, 2), {Point::Constant(1, 0), Point::Constant(1, 10)}, d), 9.0);
  EXPECT_THROW(center_proximity_alpha(near, Clustering({1, 2}, 2), {Point::Constant(1, 0)}, d), InvalidInput);
}

TEST(ProximityBound, Formula) {
  EXPECT_DOUBLE_EQ(proximity_margin_bound(3.0), 0.5);
  EXPECT_LT(proximity_margin_bound(1.0 + 1e-9), 1e-17);
  const double eps = 2.0;
  EXPECT_DOUBLE_EQ(proximity_margin_bound(1.0 + eps), eps * eps / (2 * (eps + 2)));
  EXPECT_THROW(proximity_margin_bound(1.0), InvalidInput);
  EXPECT_THROW(proximity_margin_bound(0.5), InvalidInput);
}

TEST(ProximityBound, HoldsOnGeneratedInstances) {
  for (double alpha : {1.5, 2.0, 3.0, 6.0})
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      RandomSource rng(seed);
      Instance inst = gen_center_proximity(2, 3, 150, alpha, rng);
      double measured = center_proximity_alpha(inst.points, inst.truth, inst.centers, Pseudometric::euclidean(2));
      EXPECT_GE(measured, alpha);
      EXPECT_GE(ova_margin(inst.points, inst.truth, inst.metrics).min,
                proximity_margin_bound(measured) - 1e-9);
    }
}

TEST(Packing, TwoPoints) {
  PointSet x = PointSet::from_rows({{0, 0}, {1, 0}});
  EXPECT_EQ(packing_estimate(x, 0.5, Pseudometric::euclidean(2)), 2u);
  EXPECT_EQ(packing_estimate(x, 1.0, Pseudometric::euclidean(2)), 1u);
}

TEST(Packing, ThreeCollinearPoints) {
  const double r = 0.7;
  PointSet x = PointSet::from_rows({{-r}, {0}, {r}});
  EXPECT_EQ(packing_estimate(x, 1.0, Pseudometric::euclidean(1)), 2u);
  EXPECT_EQ(packing_by_enumeration(x, 1.0), 2u);
}

TEST(Packing, ExactForSmallSetsAgainstEnumeration) {
  RandomSource rng(3);
  for (int t = 0; t < 40; ++t) {
    std::size_t n = 3 + static_cast<std::size_t>(t % 8);
    PointSet x = uniform_cube(rng, 2, n);
    for (double g : {0.3, 0.7, 1.2})
      EXPECT_EQ(packing_estimate(x, g, Pseudometric::euclidean(2)), packing_by_enumeration(x, g));
  }
}

TEST(Packing, GreedyIsALowerBound) {
  RandomSource rng(4);
  for (int t = 0; t < 10; ++t) {
    PointSet x = uniform_cube(rng, 2, 11 + static_cast<std::size_t>(t % 3));
    for (double g : {0.4, 1.0}) {
      auto est = packing_estimate(x, g, Pseudometric::euclidean(2));
      EXPECT_GE(est, 1u);
      EXPECT_LE(est, packing_by_enumeration(x, g));
    }
  }
}

TEST(Packing, UnitSquareBelowVolumeBound) {
  RandomSource rng(5);
  for (int t = 0; t < 10; ++t) {
    PointSet x = uniform_cube(rng, 2, 200);
    EXPECT_LE(packing_estimate(x, 1.0, Pseudometric::euclidean(2)), 25u);
  }
}

TEST(Packing, NonincreasingInGamma) {
  RandomSource rng(6);
  for (int t = 0; t < 10; ++t) {
    PointSet x = uniform_cube(rng, 1 + static_cast<std::size_t>(t % 3), 60);
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (double g : {0.05, 0.1, 0.2, 0.35, 0.5, 0.8, 1.0, 1.5, 1.99, 2.0, 3.0}) {
      auto now = packing_estimate(x, g, Pseudometric::euclidean(x.dim()));
      EXPECT_LE(now, prev) << "gamma " << g;
      prev = now;
    }
  }
  EXPECT_THROW(packing_estimate(PointSet::from_rows({{0}}), 0.0, Pseudometric::euclidean(1)), InvalidInput);
}

TEST(Packing, RegularSimplexPacksAllVertices) {
  // circumradius 1 ball around any vertex reaches the others at distance
  // sqrt(2 M / (M - 1)); with gamma below the limit all M points separate
  for (std::size_t size : {4u, 8u, 16u}) {
    PointSet x(regular_simplex(size, 1.0, size - 1));
    const double side = std::sqrt(2.0 * size / (size - 1.0));
    EXPECT_NEAR((x.point(0) - x.point(1)).norm(), side, 1e-12);
    EXPECT_EQ(packing_estimate(x, 0.5, Pseudometric::euclidean(size - 1)), size);
  }
}
