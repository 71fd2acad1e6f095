#include "marginrec/instances.hpp"
#include "marginrec/io.hpp"
#include "marginrec/margins.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace marginrec;

namespace {

std::string bytes(const Instance& inst) {
  std::ostringstream o;
  write_instance(inst, o);
  return o.str();
}

}  // namespace

TEST(ConvexMargin, SingleClusterIsVacuous) {
  RandomSource rng(1);
  Instance inst = gen_convex_margin(2, 1, 50, 1.0, rng);
  EXPECT_EQ(inst.size(), 50u);
  EXPECT_TRUE(std::isinf(inst.certified.at("convex_hull")));
  // all points inside one ball of unit diameter
  EXPECT_LE(diameter(Pseudometric::euclidean(2), inst.points), 1.0 + 1e-12);
}

TEST(ConvexMargin, VerifiedOverSeeds) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomSource rng(seed);
    Instance inst = gen_convex_margin(2, 3, 600, 1.0, rng);
    auto check = verify_convex_hull_margin(inst.points, inst.truth, inst.metrics, 1.0);
    EXPECT_TRUE(check.satisfied);
    EXPECT_GE(inst.certified.at("convex_hull"), 1.0);
    EXPECT_NEAR(inst.certified.at("convex_hull"), check.min_ratio, 1e-9);
  }
}

TEST(ConvexMargin, BalancedRoundRobinSizes) {
  RandomSource rng(2);
  Instance inst = gen_convex_margin(3, 4, 103, 0.5, rng);
  std::size_t lo = inst.size(), hi = 0, total = 0;
  for (auto& c : inst.truth.all_members()) {
    lo = std::min(lo, c.size());
    hi = std::max(hi, c.size());
    total += c.size();
  }
  EXPECT_EQ(total, 103u);
  EXPECT_LE(hi - lo, 1u);
}

TEST(ConvexMargin, RefusesInfeasibleAndBadInput) {
  RandomSource rng(3);
  EXPECT_THROW(gen_convex_margin(2, 9, 90, 2.0, rng, 3.0), PreconditionError);
  EXPECT_THROW(gen_convex_margin(0, 2, 10, 1.0, rng), InvalidInput);
  EXPECT_THROW(gen_convex_margin(2, 3, 2, 1.0, rng), InvalidInput);
  EXPECT_THROW(gen_convex_margin(2, 3, 6, 0.0, rng), InvalidInput);
}

TEST(Packing, TwoPointsInfiniteCertificate) {
  RandomSource rng(4);
  Instance inst = gen_packing_instance(2, 0.5, rng);
  EXPECT_EQ(inst.size(), 2u);
  EXPECT_TRUE(std::isinf(inst.certified.at("ova")));
}

TEST(Packing, SimplexOfFiveAtPointFour) {
  RandomSource rng(5);
  Instance inst = gen_packing_instance(5, 0.4, rng);
  EXPECT_GT(ova_margin(inst.points, inst.truth, inst.metrics).min, 0.4);
  // pairwise distances of a regular simplex with circumradius 1
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(inst.points.point(i).norm(), 1.0, 1e-12);
    for (std::size_t j = i + 1; j < 5; ++j) {
      double d = (inst.points.point(i) - inst.points.point(j)).norm();
      EXPECT_NEAR(d, std::sqrt(2.5), 1e-12);
      EXPECT_GT(d, 2 * 0.4 * 1.0);
    }
  }
}

TEST(Packing, EverySingletonChoiceIsValid) {
  for (std::size_t size : {3u, 8u, 16u}) {
    for (std::size_t x = 0; x < size; ++x) {
      RandomSource rng(6);
      Instance inst = gen_packing_instance(size, 0.5, rng, static_cast<long>(x));
      EXPECT_EQ(inst.truth.members(1), (IndexList{x}));
      EXPECT_GT(ova_margin(inst.points, inst.truth, inst.metrics).min, 0.5);
    }
  }
  RandomSource rng(7);
  EXPECT_THROW(gen_packing_instance(4, 0.9, rng), PreconditionError);
  EXPECT_THROW(gen_packing_instance(1, 0.5, rng), InvalidInput);
}

TEST(SvmVsOva, FigureOneValues) {
  RandomSource rng(8);
  Instance inst = gen_svm_vs_ova(0.01, 1.0, rng);
  EXPECT_TRUE(std::isinf(inst.certified.at("ova")));
  const double phi = diameter(Pseudometric::euclidean(2), inst.points);
  EXPECT_NEAR(phi, std::sqrt(2.0), 1e-15);
  EXPECT_LE(inst.certified.at("linear_ratio"), 0.01 * std::sqrt(2.0) / phi);
  EXPECT_GT(inst.certified.at("linear_ratio"), 0.0);
  EXPECT_EQ(inst.truth.labels(), (std::vector<ClusterId>{1, 1, 2, 2}));
  EXPECT_THROW(gen_svm_vs_ova(1.0, 0.5, rng), InvalidInput);
}

TEST(SphereCoslice, ThreePointsEquilateral) {
  RandomSource rng(9);
  Instance inst = gen_sphere_coslice(2, 3, rng);
  ASSERT_EQ(inst.size(), 3u);
  double d01 = (inst.points.point(0) - inst.points.point(1)).norm();
  double d12 = (inst.points.point(1) - inst.points.point(2)).norm();
  double d02 = (inst.points.point(0) - inst.points.point(2)).norm();
  EXPECT_NEAR(d01, d12, 1e-12);
  EXPECT_NEAR(d01, d02, 1e-12);
}

TEST(SphereCoslice, MarginShrinksAsSizeGrows) {
  double prev = kInfinity;
  for (std::size_t size : {4u, 8u, 16u}) {
    RandomSource rng(10);
    Instance inst = gen_sphere_coslice(3, size, rng);
    double ova = ova_margin(inst.points, inst.truth, inst.metrics).min;
    EXPECT_LT(ova, prev);
    prev = ova;
  }
}

TEST(SphereCoslice, PackingAndCapGeometry) {
  for (std::size_t size : {5u, 12u}) {
    RandomSource rng(11);
    const double rp = 0.01;
    Instance inst = gen_sphere_coslice(2, size, rng, rp);
    const double eta = inst.certified.at("eta");
    // pairwise separation of X \ {x}
    for (std::size_t i = 1; i < size; ++i)
      for (std::size_t j = i + 1; j < size; ++j)
        EXPECT_GT((inst.points.point(i) - inst.points.point(j)).norm(), eta);
    // x is the only point outside the unit ball; eta bounds its distance to
    // the part of the small circle outside the ball (dense scan)
    EXPECT_GT(inst.points.point(0).norm(), 1.0);
    Point centre = inst.points.matrix().rowwise().mean();
    double far = 0;
    for (int t = 0; t < 200000; ++t) {
      double th = 2 * 3.141592653589793 * t / 200000;
      Point y = centre;
      y[0] += rp * std::cos(th);
      y[1] += rp * std::sin(th);
      if (y.norm() > 1.0) far = std::max(far, (y - inst.points.point(0)).norm());
    }
    EXPECT_NEAR(far, eta, 1e-6);
  }
}

TEST(CenterProximity, AlphaTwoOverSeeds) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomSource rng(seed);
    Instance inst = gen_center_proximity(2, 2, 200, 2.0, rng);
    double alpha = center_proximity_alpha(inst.points, inst.truth, inst.centers, Pseudometric::euclidean(2));
    EXPECT_GE(alpha, 2.0);
    EXPECT_GE(ova_margin(inst.points, inst.truth, inst.metrics).min, proximity_margin_bound(2.0));
  }
}

TEST(CenterProximity, SingleClusterAndRefusal) {
  RandomSource rng(12);
  Instance inst = gen_center_proximity(2, 1, 30, 2.0, rng);
  EXPECT_TRUE(std::isinf(inst.certified.at("center_alpha")));
  EXPECT_THROW(gen_center_proximity(2, 4, 30, 2.0, rng), PreconditionError);
  EXPECT_THROW(gen_center_proximity(2, 2, 30, 1.0, rng), InvalidInput);
}

TEST(Generators, DeterministicBytes) {
  auto twice = [](auto make) {
    RandomSource a(42), b(42);
    return std::make_pair(bytes(make(a)), bytes(make(b)));
  };
  std::vector<std::pair<std::string, std::string>> pairs = {
      twice([](RandomSource& r) { return gen_convex_margin(3, 3, 200, 1.0, r); }),
      twice([](RandomSource& r) { return gen_packing_instance(8, 0.5, r); }),
      twice([](RandomSource& r) { return gen_svm_vs_ova(0.01, 1.0, r); }),
      twice([](RandomSource& r) { return gen_sphere_coslice(3, 10, r); }),
      twice([](RandomSource& r) { return gen_center_proximity(2, 3, 100, 3.0, r); })};
  for (auto& [x, y] : pairs) EXPECT_EQ(x, y);
  RandomSource c(43), d(42);
  EXPECT_NE(bytes(gen_convex_margin(3, 3, 200, 1.0, c)), bytes(gen_convex_margin(3, 3, 200, 1.0, d)));
}
