#pragma once

#include "marginrec/core.hpp"
#include "marginrec/oracle.hpp"

#include <cstdint>
#include <vector>

namespace marginrec {

struct RoundLog {
  std::size_t sampled = 0;
  std::size_t newly_labeled = 0;
  std::size_t remaining = 0;
  bool fallback = false;
};

struct RecoveryReport {
  Clustering labels;
  std::uint64_t label_queries = 0;
  std::uint64_t scq_queries = 0;
  std::size_t rounds = 0;  // includes the fallback round, if any
  std::vector<RoundLog> per_round;
  bool exact = false;
  std::size_t misclassified_ever = 0;
  bool used_fallback = false;
};

// One-sided audit shared by both algorithms. Points are assigned through
// record(); a wrong assignment is counted and, when strict, thrown.
template <class Labeler>
class AssignmentAudit {
 public:
  AssignmentAudit(Labeler& labeler, bool strict) : labeler_(labeler), strict_(strict) {}

  void record(PointIndex p, ClusterId id) {
    if (labeler_.truth_id(id) != labeler_.oracle().audit(p)) {
      ++wrong_;
      if (strict_)
        throw Error("one-sided violation: point " + std::to_string(p) + " assigned label " +
                    std::to_string(id));
    }
  }

  std::size_t wrong() const { return wrong_; }

 private:
  Labeler& labeler_;
  bool strict_;
  std::size_t wrong_ = 0;
};

template <class Labeler>
void finish_report(RecoveryReport& r, std::vector<ClusterId> labels, const Labeler& labeler,
                   std::size_t wrong) {
  const LabelOracle& o = labeler.oracle();
  r.exact = true;
  for (std::size_t p = 0; p < labels.size(); ++p)
    if (labeler.truth_id(labels[p]) != o.audit(p)) r.exact = false;
  r.labels = Clustering(std::move(labels), labeler.k());
  r.label_queries = o.label_queries();
  r.scq_queries = o.scq_queries();
  r.rounds = r.per_round.size();
  r.misclassified_ever = wrong;
}

}  // namespace marginrec
