#include "marginrec/instances.hpp"
#include "marginrec/oracle.hpp"
#include "marginrec/recovery/cheatr.hpp"
#include "marginrec/sampling/random.hpp"

#include <gtest/gtest.h>

using namespace marginrec;

TEST(Clustering, ValidatesIdsAndAllowsEmptyClusters) {
  EXPECT_THROW(Clustering({1, 4}, 3), InvalidInput);
  EXPECT_THROW(Clustering({0}, 3), InvalidInput);
  EXPECT_THROW(Clustering({}, 0), InvalidInput);
  Clustering c({1, 1, 3}, 3);
  EXPECT_TRUE(c.members(2).empty());
  EXPECT_EQ(c.members(1), (IndexList{0, 1}));
  EXPECT_EQ(c.all_members().size(), 3u);
}

TEST(Clustering, RelabelingEquivalence) {
  Clustering a({1, 1, 2, 3}, 3), b({2, 2, 3, 1}, 3), c({2, 2, 2, 1}, 3);
  EXPECT_TRUE(equal_up_to_relabeling(a, b));
  EXPECT_FALSE(equal_up_to_relabeling(a, c));
  EXPECT_FALSE(equal_up_to_relabeling(c, a));
}

TEST(LabelOracle, RepeatedQueryCountsTwice) {
  LabelOracle o(Clustering({2, 1, 2}, 2));
  EXPECT_EQ(o.label_query(0), 2);
  EXPECT_EQ(o.label_query(0), 2);
  EXPECT_EQ(o.label_queries(), 2u);
  EXPECT_THROW(o.label_query(3), InvalidInput);
  EXPECT_THROW(o.same_cluster_query(0, 9), InvalidInput);
}

TEST(LabelOracle, ExhaustiveBaseline) {
  std::vector<ClusterId> labels = {1, 2, 2, 3, 1, 3, 3};
  LabelOracle o(Clustering(labels, 3));
  std::vector<ClusterId> got;
  for (std::size_t i = 0; i < labels.size(); ++i) got.push_back(o.label_query(i));
  EXPECT_EQ(got, labels);
  EXPECT_EQ(o.label_queries(), labels.size());
  EXPECT_EQ(o.scq_queries(), 0u);
}

TEST(LabelOracle, AgreesWithGeneratorLabels) {
  RandomSource rng(1);
  Instance inst = gen_convex_margin(2, 3, 300, 1.0, rng);
  LabelOracle o(inst.truth);
  RandomSource pick(2);
  for (int t = 0; t < 100; ++t) {
    auto i = static_cast<PointIndex>(pick.uniform_index(inst.size()));
    EXPECT_EQ(o.label_query(i), inst.truth[i]);
  }
  EXPECT_EQ(o.label_queries(), 100u);
}

TEST(LabelOracle, SameClusterQueries) {
  RandomSource rng(3);
  Instance inst = gen_convex_margin(2, 2, 50, 1.0, rng);
  LabelOracle o(inst.truth);
  EXPECT_TRUE(o.same_cluster_query(5, 5));
  IndexList a = inst.truth.members(1), b = inst.truth.members(2);
  EXPECT_FALSE(o.same_cluster_query(a[0], b[0]));
  RandomSource pick(4);
  for (int t = 0; t < 50; ++t) {
    auto x = static_cast<PointIndex>(pick.uniform_index(50));
    auto y = static_cast<PointIndex>(pick.uniform_index(50));
    EXPECT_EQ(o.same_cluster_query(x, y), o.same_cluster_query(y, x));
  }
  EXPECT_EQ(o.scq_queries(), 102u);
  EXPECT_EQ(o.label_queries(), 0u);
}

TEST(Emulation, ScqViaTwoLabels) {
  LabelOracle o(Clustering({1, 1, 2}, 2));
  EXPECT_TRUE(scq_via_labels(o, 0, 1));
  EXPECT_EQ(o.label_queries(), 2u);
  EXPECT_FALSE(scq_via_labels(o, 0, 2));
  EXPECT_EQ(o.label_queries(), 4u);
  EXPECT_EQ(o.scq_queries(), 0u);
}

TEST(Emulation, LabelViaScqWorstCaseIsK) {
  LabelOracle o(Clustering({1, 2, 3, 4, 4}, 4));
  IndexList reps = {0, 1, 2, 3};
  EXPECT_EQ(label_via_scq(o, 4, reps), 4);
  EXPECT_EQ(o.scq_queries(), 4u);
  // unseen id when the representative list is incomplete
  EXPECT_EQ(label_via_scq(o, 3, IndexList{0, 1, 2}), 4);
}

TEST(Emulation, ScqLabelerStaysWithinK) {
  RandomSource rng(5);
  Instance inst = gen_convex_margin(2, 4, 200, 1.0, rng);
  LabelOracle o(inst.truth);
  ScqLabeler lab(o);
  std::vector<ClusterId> got;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    auto before = o.scq_queries();
    got.push_back(lab.label(i));
    EXPECT_LE(o.scq_queries() - before, 4u);
  }
  EXPECT_TRUE(equal_up_to_relabeling(Clustering(got, 4), inst.truth));
  for (std::size_t i = 0; i < inst.size(); ++i) EXPECT_EQ(lab.truth_id(got[i]), inst.truth[i]);
}

TEST(Emulation, ScqRecoveryMatchesLabelRecoveryUpToPermutation) {
  RandomSource rng(6);
  Instance inst = gen_convex_margin(2, 3, 900, 1.0, rng);
  CheatrConfig cfg;
  cfg.gamma = 1.0;
  LabelOracle direct(inst.truth);
  RandomSource r1(7);
  RecoveryReport a = cheatr(inst.points, direct, cfg, r1);
  LabelOracle scq(inst.truth);
  ScqLabeler lab(scq);
  RandomSource r2(7);
  RecoveryReport b = cheatr(inst.points, lab, cfg, r2);
  EXPECT_TRUE(a.exact);
  EXPECT_TRUE(b.exact);
  EXPECT_EQ(scq.label_queries(), 0u);
  EXPECT_GT(scq.scq_queries(), 0u);
  EXPECT_TRUE(equal_up_to_relabeling(a.labels, b.labels));
}
