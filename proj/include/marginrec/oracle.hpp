#pragma once

#include "marginrec/core.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace marginrec {

// Assignment of every point index to an id in 1..k. Empty clusters allowed.
class Clustering {
 public:
  Clustering() = default;
  Clustering(std::vector<ClusterId> labels, int k) : labels_(std::move(labels)), k_(k) {
    if (k_ < 1) throw InvalidInput("Clustering: k must be >= 1");
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] < 1 || labels_[i] > k_)
        throw InvalidInput("Clustering: label " + std::to_string(labels_[i]) + " of point " +
                           std::to_string(i) + " is outside 1.." + std::to_string(k_));
  }

  std::size_t size() const { return labels_.size(); }
  int k() const { return k_; }
  ClusterId operator[](PointIndex i) const { return labels_.at(i); }
  const std::vector<ClusterId>& labels() const { return labels_; }

  IndexList members(ClusterId id) const {
    IndexList out;
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == id) out.push_back(i);
    return out;
  }

  std::vector<IndexList> all_members() const {
    std::vector<IndexList> out(static_cast<std::size_t>(k_));
    for (std::size_t i = 0; i < labels_.size(); ++i)
      out[static_cast<std::size_t>(labels_[i] - 1)].push_back(i);
    return out;
  }

  bool operator==(const Clustering& o) const { return k_ == o.k_ && labels_ == o.labels_; }

 private:
  std::vector<ClusterId> labels_;
  int k_ = 1;
};

// True when a and b agree after a bijective renaming of ids.
inline bool equal_up_to_relabeling(const Clustering& a, const Clustering& b) {
  if (a.size() != b.size()) return false;
  std::vector<int> fwd(static_cast<std::size_t>(a.k()) + 1, 0);
  std::vector<int> bwd(static_cast<std::size_t>(b.k()) + 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    int x = a[i], y = b[i];
    int& f = fwd[static_cast<std::size_t>(x)];
    int& g = bwd[static_cast<std::size_t>(y)];
    if (f == 0 && g == 0) {
      f = y;
      g = x;
    } else if (f != y || g != x) {
      return false;
    }
  }
  return true;
}

// Ground truth behind a query interface. All algorithm access to labels goes
// through label_query / same_cluster_query, which are counted. audit() is for
// evaluation code (exactness, one-sided checks) and is not counted.
class LabelOracle {
 public:
  explicit LabelOracle(Clustering truth) : truth_(std::move(truth)) {}

  std::size_t size() const { return truth_.size(); }
  int k() const { return truth_.k(); }

  ClusterId label_query(PointIndex x) {
    check(x);
    ++label_queries_;
    return truth_[x];
  }

  bool same_cluster_query(PointIndex x, PointIndex y) {
    check(x);
    check(y);
    ++scq_queries_;
    return truth_[x] == truth_[y];
  }

  ClusterId audit(PointIndex x) const {
    check(x);
    return truth_[x];
  }
  const Clustering& truth() const { return truth_; }

  std::uint64_t label_queries() const { return label_queries_; }
  std::uint64_t scq_queries() const { return scq_queries_; }

 private:
  void check(PointIndex x) const {
    if (x >= truth_.size())
      throw InvalidInput("oracle: point index " + std::to_string(x) + " out of range (n = " +
                         std::to_string(truth_.size()) + ")");
  }

  Clustering truth_;
  std::uint64_t label_queries_ = 0;
  std::uint64_t scq_queries_ = 0;
};

// Two label queries.
inline bool scq_via_labels(LabelOracle& o, PointIndex x, PointIndex y) {
  ClusterId a = o.label_query(x);
  ClusterId b = o.label_query(y);
  return a == b;
}

// representatives[j] is a point carrying discovered id j+1. Returns the
// matching id, or representatives.size()+1 when x matches none of them.
// One SCQ per representative tried, so at most k.
inline ClusterId label_via_scq(LabelOracle& o, PointIndex x, const IndexList& representatives) {
  for (std::size_t j = 0; j < representatives.size(); ++j)
    if (o.same_cluster_query(x, representatives[j])) return static_cast<ClusterId>(j + 1);
  return static_cast<ClusterId>(representatives.size() + 1);
}

// Label source used by the recovery algorithms. truth_id maps an id handed out
// by label() to the ground-truth id, for audits only.
class DirectLabeler {
 public:
  explicit DirectLabeler(LabelOracle& o) : o_(o) {}
  int k() const { return o_.k(); }
  ClusterId label(PointIndex x) { return o_.label_query(x); }
  ClusterId truth_id(ClusterId id) const { return id; }
  LabelOracle& oracle() { return o_; }
  const LabelOracle& oracle() const { return o_; }

 private:
  LabelOracle& o_;
};

// Learns labels with same-cluster queries only. Ids are in discovery order,
// so they match the truth up to a permutation.
class ScqLabeler {
 public:
  explicit ScqLabeler(LabelOracle& o) : o_(o) {}
  int k() const { return o_.k(); }
  ClusterId label(PointIndex x) {
    ClusterId id = label_via_scq(o_, x, reps_);
    if (static_cast<std::size_t>(id) > reps_.size()) {
      if (reps_.size() >= static_cast<std::size_t>(o_.k()))
        throw Error("ScqLabeler: more than k distinct clusters discovered");
      reps_.push_back(x);
    }
    return id;
  }
  ClusterId truth_id(ClusterId id) const {
    if (id < 1 || static_cast<std::size_t>(id) > reps_.size()) return 0;
    return o_.audit(reps_[static_cast<std::size_t>(id - 1)]);
  }
  const IndexList& representatives() const { return reps_; }
  LabelOracle& oracle() { return o_; }
  const LabelOracle& oracle() const { return o_; }

 private:
  LabelOracle& o_;
  IndexList reps_;
};

}  // namespace marginrec
