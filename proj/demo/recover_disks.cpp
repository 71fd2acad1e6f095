// Generates three well-separated disks, recovers them with both algorithms
// and prints the query counts.
#include "marginrec/marginrec.hpp"

#include <iostream>

int main() {
  using namespace marginrec;
  RandomSource gen_rng(7);
  Instance inst = gen_convex_margin(2, 3, 3000, 1.0, gen_rng);
  std::cout << "instance: n=" << inst.size() << " k=" << inst.k()
            << " certified hull margin=" << inst.certified["convex_hull"] << "\n";

  {
    LabelOracle oracle(inst.truth);
    RandomSource rng(1);
    CheatrConfig cfg;
    cfg.gamma = 1.0;
    RecoveryReport r = cheatr(inst.points, oracle, cfg, rng);
    std::cout << "cheatr: exact=" << r.exact << " label_queries=" << r.label_queries
              << " rounds=" << r.rounds << "\n";
    for (std::size_t i = 0; i < r.per_round.size(); ++i)
      std::cout << "  round " << i + 1 << ": sampled " << r.per_round[i].sampled << ", labeled "
                << r.per_round[i].newly_labeled << ", left " << r.per_round[i].remaining
                << (r.per_round[i].fallback ? " (fallback)" : "") << "\n";
  }
  {
    LabelOracle oracle(inst.truth);
    RandomSource rng(1);
    MrecurConfig cfg;
    cfg.gamma = 1.0;
    cfg.metrics = inst.metrics;
    RecoveryReport r = mrecur(inst.points, oracle, cfg, rng);
    std::cout << "mrecur: exact=" << r.exact << " label_queries=" << r.label_queries
              << " rounds=" << r.rounds << "\n";
  }
}
