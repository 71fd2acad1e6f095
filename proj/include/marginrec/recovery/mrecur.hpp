#pragma once

#include "marginrec/core.hpp"
#include "marginrec/geometry/pseudometric.hpp"
#include "marginrec/margins.hpp"
#include "marginrec/oracle.hpp"
#include "marginrec/recovery/closure.hpp"
#include "marginrec/recovery/report.hpp"
#include "marginrec/sampling/random.hpp"
#include "marginrec/sampling/walk.hpp"

#include <cmath>
#include <map>
#include <type_traits>

namespace marginrec {

struct MrecurConfig {
  double gamma = 1.0;
  std::vector<Pseudometric> metrics;
  double sample_multiplier = 2.0;
  std::size_t m_override = 0;
  std::size_t round_cap = 0;  // 0: 8 ceil(log2(n+1))
  bool strict_one_sided = false;

  void validate(int k, std::size_t dim) const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidInput("mrecur: gamma must be a positive finite number");
    if (metrics.size() != static_cast<std::size_t>(k))
      throw InvalidInput("mrecur: expected " + std::to_string(k) + " metrics, got " +
                         std::to_string(metrics.size()));
    for (const auto& d : metrics)
      if (d.dim() != dim) throw InvalidInput("mrecur: metric dimension mismatch");
    if (!(sample_multiplier > 0.0)) throw InvalidInput("mrecur: sample multiplier must be positive");
  }

  // max(2, max_i packing_estimate(X, gamma, d_i)), capped at n
  std::size_t packing_bound(const PointSet& x) const {
    if (m_override > 0) return m_override;
    std::size_t m = 2;
    for (const auto& d : metrics) m = std::max(m, packing_estimate(x, gamma, d));
    return std::min(m, std::max<std::size_t>(x.size(), 1));
  }

  // ceil(c M k max(1, ln k))
  std::size_t sample_size(std::size_t m, int k) const {
    const double kd = static_cast<double>(k);
    double v = sample_multiplier * static_cast<double>(m) * kd * std::max(1.0, std::log(kd));
    return static_cast<std::size_t>(std::max(1.0, std::ceil(v)));
  }
};

template <class Labeler>
RecoveryReport mrecur(const PointSet& x, Labeler& labeler, const MrecurConfig& cfg,
                      RandomSource& rng) {
  const int k = labeler.k();
  cfg.validate(k, x.dim());
  if constexpr (std::is_same_v<Labeler, ScqLabeler>) {
    for (const auto& d : cfg.metrics)
      if (!(d == cfg.metrics.front()))
        throw InvalidInput("mrecur: same-cluster-only recovery needs one shared metric");
  }
  const std::size_t n = x.size();
  if (labeler.oracle().size() != n) throw InvalidInput("mrecur: oracle size does not match point count");
  RecoveryReport report;
  if (n == 0) {
    report.labels = Clustering({}, k);
    report.exact = true;
    return report;
  }
  const std::size_t batch = cfg.sample_size(cfg.packing_bound(x), k);
  const std::size_t cap =
      cfg.round_cap > 0 ? cfg.round_cap
                        : 8 * static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n) + 1.0)));
  AssignmentAudit<Labeler> audit(labeler, cfg.strict_one_sided);

  std::vector<ClusterId> labels(n, 0);
  IndexList remaining = iota_indices(n);
  for (std::size_t round = 0; round < cap && !remaining.empty(); ++round) {
    RoundLog log;
    IndexList sample = sample_without_replacement(remaining, batch, rng);
    std::map<ClusterId, IndexList> groups;
    for (auto p : sample) {
      ClusterId id = labeler.label(p);
      labels[p] = id;
      groups[id].push_back(p);
    }
    log.sampled = log.newly_labeled = sample.size();
    if (sample.size() < remaining.size()) {
      for (auto& [id, members] : groups) {
        const Pseudometric& d = cfg.metrics[static_cast<std::size_t>(id - 1)];
        for (auto p : smallest_consistent(x, remaining, members, d, cfg.gamma)) {
          if (labels[p] != 0) continue;
          labels[p] = id;
          audit.record(p, id);
          ++log.newly_labeled;
        }
      }
    }
    IndexList next;
    for (auto p : remaining)
      if (labels[p] == 0) next.push_back(p);
    remaining.swap(next);
    log.remaining = remaining.size();
    report.per_round.push_back(log);
  }
  if (!remaining.empty()) {
    RoundLog log;
    log.fallback = true;
    for (auto p : remaining) labels[p] = labeler.label(p);
    log.sampled = log.newly_labeled = remaining.size();
    report.per_round.push_back(log);
    report.used_fallback = true;
  }
  finish_report(report, std::move(labels), labeler, audit.wrong());
  return report;
}

inline RecoveryReport mrecur(const PointSet& x, LabelOracle& o, const MrecurConfig& cfg,
                             RandomSource& rng) {
  DirectLabeler labeler(o);
  return mrecur(x, labeler, cfg, rng);
}

}  // namespace marginrec
