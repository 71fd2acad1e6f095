#pragma once

#include "marginrec/core.hpp"
#include "marginrec/geometry/hull.hpp"
#include "marginrec/geometry/hull_distance.hpp"
#include "marginrec/geometry/pseudometric.hpp"
#include "marginrec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace marginrec {

// d / phi with the conventions: d = 0 gives 0, phi = 0 < d gives infinity.
inline double margin_ratio(double dist, double diam) {
  if (dist == 0.0) return 0.0;
  if (diam == 0.0) return kInfinity;
  return dist / diam;
}

struct MarginReport {
  std::vector<double> per_cluster;  // ratio per cluster id 1..k
  double min = kInfinity;
};

namespace detail {

inline void check_metrics(const PointSet& x, const Clustering& c,
                          const std::vector<Pseudometric>& metrics, const char* what) {
  if (metrics.size() != static_cast<std::size_t>(c.k()))
    throw InvalidInput(std::string(what) + ": expected " + std::to_string(c.k()) +
                       " metrics, got " + std::to_string(metrics.size()));
  if (c.size() != x.size())
    throw InvalidInput(std::string(what) + ": clustering size does not match point count");
  for (const auto& d : metrics)
    if (d.dim() != x.dim()) throw InvalidInput(std::string(what) + ": metric dimension mismatch");
}

inline IndexList complement(const IndexList& members, std::size_t n) {
  std::vector<char> in(n, 0);
  for (auto i : members) in[i] = 1;
  IndexList out;
  for (std::size_t i = 0; i < n; ++i)
    if (!in[i]) out.push_back(i);
  return out;
}

}  // namespace detail

// Per cluster d_i(X \ C_i, C_i) / phi_{d_i}(C_i); empty clusters and clusters
// with no outside points are infinite.
inline MarginReport ova_margin(const PointSet& x, const Clustering& c,
                               const std::vector<Pseudometric>& metrics) {
  detail::check_metrics(x, c, metrics, "ova_margin");
  MarginReport r;
  auto groups = c.all_members();
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const IndexList& ci = groups[i];
    double ratio = kInfinity;
    if (!ci.empty()) {
      IndexList out = detail::complement(ci, x.size());
      double dist = set_distance(metrics[i], x, out, ci);
      ratio = margin_ratio(dist, diameter(metrics[i], x, ci));
    }
    r.per_cluster.push_back(ratio);
    r.min = std::min(r.min, ratio);
  }
  return r;
}

struct HullMarginReport {
  bool satisfied = true;
  std::vector<double> slack;  // min over outside y of d(y, conv C_i) - gamma phi(C_i)
  std::vector<double> ratio;  // min over outside y of d(y, conv C_i) / phi(C_i)
  double min_slack = kInfinity;
  double min_ratio = kInfinity;
};

// Checks d_i(y, conv C_i) > gamma phi(C_i) + strictness for every y outside C_i.
// Hull distances use the certified lower bound of the min-norm solver.
inline HullMarginReport verify_convex_hull_margin(const PointSet& x, const Clustering& c,
                                                  const std::vector<Pseudometric>& metrics,
                                                  double gamma,
                                                  double strictness = default_tolerances().strictness) {
  detail::check_metrics(x, c, metrics, "verify_convex_hull_margin");
  if (!(gamma >= 0.0)) throw InvalidInput("verify_convex_hull_margin: gamma must be >= 0");
  HullMarginReport r;
  auto groups = c.all_members();
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const IndexList& ci = groups[i];
    double dmin = kInfinity;
    double diam = 0.0;
    if (!ci.empty()) {
      diam = diameter(metrics[i], x, ci);
      PointSet hull = extreme_points(x.subset(ci));
      for (PointIndex y : detail::complement(ci, x.size()))
        dmin = std::min(dmin, hull_distance_result(metrics[i], hull, x[y], 1e-10).lower_bound);
    }
    double slack = dmin == kInfinity ? kInfinity : dmin - gamma * diam;
    double ratio = dmin == kInfinity ? kInfinity : margin_ratio(dmin, diam);
    r.slack.push_back(slack);
    r.ratio.push_back(ratio);
    r.min_slack = std::min(r.min_slack, slack);
    r.min_ratio = std::min(r.min_ratio, ratio);
    if (!(slack > strictness)) r.satisfied = false;
  }
  return r;
}

// min over x in C_i, j != i of d(x, c_j) / d(x, c_i); zero denominators
// contribute infinity.
inline double center_proximity_alpha(const PointSet& x, const Clustering& c,
                                     const std::vector<Point>& centers, const Pseudometric& d) {
  if (centers.size() != static_cast<std::size_t>(c.k()))
    throw InvalidInput("center_proximity_alpha: expected " + std::to_string(c.k()) +
                       " centers, got " + std::to_string(centers.size()));
  if (c.size() != x.size())
    throw InvalidInput("center_proximity_alpha: clustering size does not match point count");
  double alpha = kInfinity;
  for (std::size_t p = 0; p < x.size(); ++p) {
    const std::size_t own = static_cast<std::size_t>(c[p] - 1);
    const double dn = d(x[p], centers[own]);
    if (dn == 0.0) continue;
    for (std::size_t j = 0; j < centers.size(); ++j)
      if (j != own) alpha = std::min(alpha, d(x[p], centers[j]) / dn);
  }
  return alpha;
}

// (alpha - 1)^2 / (2 (alpha + 1)).
inline double proximity_margin_bound(double alpha) {
  if (!(alpha > 1.0)) throw InvalidInput("proximity_margin_bound: alpha must be > 1");
  if (std::isinf(alpha)) return kInfinity;
  return (alpha - 1.0) * (alpha - 1.0) / (2.0 * (alpha + 1.0));
}

// ---------------------------------------------------------------------------
// Packing estimate: max over balls B(x, r) (x in X) of the size of a subset
// of X within the ball whose pairwise distances exceed gamma * r. This is a
// lower bound on the ambient supremum.

namespace detail {

// Largest subset of `pts` with pairwise distance > sep, by exhaustive search.
inline std::size_t exact_packing(const Pseudometric& d, const PointSet& x, const IndexList& pts,
                                 double sep) {
  const std::size_t n = pts.size();
  std::vector<std::uint32_t> conflict(n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b && !(d.norm_of_difference(x[pts[a]], x[pts[b]]) > sep))
        conflict[a] |= (1u << b);
  std::size_t best = 0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::size_t cnt = static_cast<std::size_t>(__builtin_popcount(mask));
    if (cnt <= best) continue;
    bool ok = true;
    for (std::size_t a = 0; a < n && ok; ++a)
      if ((mask >> a & 1u) && (conflict[a] & mask)) ok = false;
    if (ok) best = cnt;
  }
  return best;
}

// Greedy packing visiting points by decreasing distance from the center.
inline std::size_t greedy_packing(const Pseudometric& d, const PointSet& x,
                                  const std::vector<std::pair<double, PointIndex>>& by_dist,
                                  std::size_t count, double sep) {
  IndexList chosen;
  for (std::size_t t = count; t-- > 0;) {
    PointIndex p = by_dist[t].second;
    bool ok = true;
    // newest first: the likeliest conflict is the last point taken
    for (auto it = chosen.rbegin(); it != chosen.rend(); ++it)
      if (!(d.norm_of_difference(x[p], x[*it]) > sep)) {
        ok = false;
        break;
      }
    if (ok) chosen.push_back(p);
  }
  return chosen.size();
}

inline std::size_t packing_exhaustive(const PointSet& x, double gamma, const Pseudometric& d) {
  std::size_t best = x.empty() ? 0 : 1;
  for (std::size_t c = 0; c < x.size(); ++c) {
    for (std::size_t rj = 0; rj < x.size(); ++rj) {
      const double r = d.norm_of_difference(x[c], x[rj]);
      if (!(r > 0.0)) continue;
      IndexList ball;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (d.norm_of_difference(x[c], x[i]) <= r) ball.push_back(i);
      if (ball.size() <= best) continue;
      best = std::max(best, exact_packing(d, x, ball, gamma * r));
    }
  }
  return best;
}

// Greedy surrogate over at most 32 centers and 32 radius quantiles per
// center, for each separation ratio in `ratios`.
inline std::size_t packing_greedy(const PointSet& x, const std::vector<double>& ratios,
                                  const Pseudometric& d) {
  const std::size_t n = x.size();
  std::size_t best = n ? 1 : 0;
  const std::size_t centers = std::min<std::size_t>(n, 32);
  std::vector<std::pair<double, PointIndex>> by_dist(n);
  for (std::size_t ci = 0; ci < centers; ++ci) {
    const PointIndex c = (ci * n) / centers;
    for (std::size_t i = 0; i < n; ++i) by_dist[i] = {d.norm_of_difference(x[c], x[i]), i};
    std::sort(by_dist.begin(), by_dist.end());
    const std::size_t radii = std::min<std::size_t>(n - 1, 32);
    for (std::size_t q = 1; q <= radii; ++q) {
      std::size_t pos = (q * (n - 1)) / radii;
      const double r = by_dist[pos].first;
      if (!(r > 0.0)) continue;
      while (pos + 1 < n && by_dist[pos + 1].first <= r) ++pos;
      for (double g : ratios) best = std::max(best, greedy_packing(d, x, by_dist, pos + 1, g * r));
    }
  }
  return best;
}

}  // namespace detail

// Exact for n <= 10. Otherwise the greedy value is maximised over the ratios
// 2^(j/8) in [gamma, 2), which keeps the estimate nonincreasing in gamma; any
// packing at a larger ratio is also one at gamma. For gamma >= 2 a ball of
// radius r holds no two points more than 2r apart, so the answer is 1.
inline std::size_t packing_estimate(const PointSet& x, double gamma, const Pseudometric& d) {
  if (!(gamma > 0.0)) throw InvalidInput("packing_estimate: gamma must be > 0");
  if (!x.empty() && x.dim() != d.dim()) throw InvalidInput("packing_estimate: dimension mismatch");
  if (x.size() <= 1) return x.size();
  if (x.size() <= 10) return detail::packing_exhaustive(x, gamma, d);
  if (gamma >= 2.0) return 1;
  std::vector<double> ratios;
  const int j0 = static_cast<int>(std::ceil(8.0 * std::log2(gamma) - 1e-9));
  for (int j = j0; j < 8; ++j) {
    const double g = std::exp2(j / 8.0);
    if (g >= gamma) ratios.push_back(g);
  }
  if (ratios.empty()) return 1;
  return detail::packing_greedy(x, ratios, d);
}

}  // namespace marginrec
