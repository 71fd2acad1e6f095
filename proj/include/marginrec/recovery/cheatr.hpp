#pragma once

#include "marginrec/core.hpp"
#include "marginrec/geometry/hull.hpp"
#include "marginrec/oracle.hpp"
#include "marginrec/recovery/report.hpp"
#include "marginrec/sampling/random.hpp"
#include "marginrec/sampling/walk.hpp"

#include <cmath>
#include <map>
#include <memory>

namespace marginrec {

struct CheatrConfig {
  enum class SampleRule { desk, paper };
  double gamma = 1.0;
  std::size_t s = 0;  // 0: derive from the sample rule
  double c_s = 10.0;
  SampleRule sample_rule = SampleRule::desk;
  WalkConfig walk;
  std::size_t round_cap = 0;  // 0: 8 ceil(log2(n+1))
  double tol = 1e-8;
  bool strict_one_sided = false;

  void validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidInput("cheatr: gamma must be a positive finite number");
    if (!(c_s > 0.0)) throw InvalidInput("cheatr: c_s must be positive");
    if (!(tol > 0.0)) throw InvalidInput("cheatr: tol must be positive");
    walk.validate();
  }

  // desk:  ceil(c_s (1+1/gamma)^m ln(e + 1/gamma))
  // paper: ceil(c_s m^5 (1+1/gamma)^m ln(1 + 1/gamma))
  std::size_t sample_size(std::size_t m) const {
    if (s > 0) return s;
    const double md = static_cast<double>(std::max<std::size_t>(m, 1));
    const double base = std::pow(1.0 + 1.0 / gamma, md);
    double v = sample_rule == SampleRule::paper
                   ? c_s * std::pow(md, 5.0) * base * std::log1p(1.0 / gamma)
                   : c_s * base * std::log(std::exp(1.0) + 1.0 / gamma);
    return static_cast<std::size_t>(std::max(1.0, std::ceil(v)));
  }

  std::size_t rounds_for(std::size_t n) const {
    if (round_cap > 0) return round_cap;
    return 8 * static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n) + 1.0)));
  }
};

// z + (1+gamma)(conv(S) - z) with z the approximate centroid of conv(S).
inline ScaledHull hull_trick(const PointSet& s, double gamma, const WalkConfig& walk,
                             RandomSource& rng, double tol = 1e-8) {
  if (s.empty()) throw InvalidInput("hull_trick: empty sample");
  if (!(gamma > 0.0)) throw InvalidInput("hull_trick: gamma must be > 0");
  PointSet hull = extreme_points(s, tol);
  Point z = approx_centroid(hull, walk, rng);
  return ScaledHull(hull, z, gamma, tol);
}

template <class Labeler>
RecoveryReport cheatr(const PointSet& x, Labeler& labeler, const CheatrConfig& cfg,
                      RandomSource& rng) {
  cfg.validate();
  const std::size_t n = x.size();
  if (labeler.oracle().size() != n) throw InvalidInput("cheatr: oracle size does not match point count");
  RecoveryReport report;
  if (n == 0) {
    report.labels = Clustering({}, labeler.k());
    report.exact = true;
    return report;
  }
  const std::size_t k = static_cast<std::size_t>(labeler.k());
  const std::size_t batch = k * cfg.sample_size(x.dim());
  const std::size_t cap = cfg.rounds_for(n);
  AssignmentAudit<Labeler> audit(labeler, cfg.strict_one_sided);

  std::vector<ClusterId> labels(n, 0);
  IndexList remaining = iota_indices(n);
  auto drop_labeled = [&] {
    IndexList next;
    next.reserve(remaining.size());
    for (auto p : remaining)
      if (labels[p] == 0) next.push_back(p);
    remaining.swap(next);
  };

  for (std::size_t round = 0; round < cap && !remaining.empty(); ++round) {
    RoundLog log;
    IndexList sample = sample_without_replacement(remaining, batch, rng);
    std::map<ClusterId, IndexList> groups;
    for (auto p : sample) {
      ClusterId id = labeler.label(p);
      labels[p] = id;
      groups[id].push_back(p);
    }
    log.sampled = sample.size();
    log.newly_labeled = sample.size();
    drop_labeled();

    if (!remaining.empty() && k == 1) {
      // one cluster: every point shares the sampled label
      const ClusterId id = groups.begin()->first;
      for (auto p : remaining) {
        labels[p] = id;
        audit.record(p, id);
      }
      log.newly_labeled += remaining.size();
      remaining.clear();
    }
    for (auto& [id, members] : groups) {
      if (remaining.empty()) break;
      ScaledHull accept = hull_trick(x.subset(members), cfg.gamma, cfg.walk, rng, cfg.tol);
      for (auto p : remaining) {
        if (labels[p] != 0 || !accept(x[p])) continue;
        labels[p] = id;
        audit.record(p, id);
        ++log.newly_labeled;
      }
      drop_labeled();
    }
    log.remaining = remaining.size();
    report.per_round.push_back(log);
  }

  if (!remaining.empty()) {
    RoundLog log;
    log.fallback = true;
    for (auto p : remaining) labels[p] = labeler.label(p);
    log.sampled = log.newly_labeled = remaining.size();
    remaining.clear();
    report.per_round.push_back(log);
    report.used_fallback = true;
  }
  finish_report(report, std::move(labels), labeler, audit.wrong());
  return report;
}

inline RecoveryReport cheatr(const PointSet& x, LabelOracle& o, const CheatrConfig& cfg,
                             RandomSource& rng) {
  DirectLabeler labeler(o);
  return cheatr(x, labeler, cfg, rng);
}

}  // namespace marginrec
