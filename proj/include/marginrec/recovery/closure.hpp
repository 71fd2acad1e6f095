#pragma once

#include "marginrec/core.hpp"
#include "marginrec/geometry/pseudometric.hpp"

#include <algorithm>
#include <vector>

namespace marginrec {

// Absorbs floating-point ties in favour of adding points.
inline double closure_threshold(double gamma, double diam) {
  return gamma * diam * (1.0 + 1e-12) + 1e-12;
}

// C is in H (relative to `universe`) when every y in universe \ C has
// d(y, C) above closure_threshold(gamma, phi(C)).
inline bool in_margin_class(const PointSet& x, const IndexList& universe, const IndexList& c,
                            const Pseudometric& d, double gamma) {
  std::vector<char> in(x.size(), 0);
  for (auto p : c) in[p] = 1;
  const double thr = closure_threshold(gamma, diameter(d, x, c));
  for (PointIndex y : universe) {
    if (in[y]) continue;
    for (PointIndex p : c)
      if (!(d.norm_of_difference(x[y], x[p]) > thr)) return false;
  }
  return true;
}

// Smallest member of H containing S (H closed under intersection): grow C
// from S, adding every y with d(y, C) <= threshold(phi(C)), until stable.
// Result is sorted.
inline IndexList smallest_consistent(const PointSet& x, const IndexList& universe,
                                     const IndexList& s, const Pseudometric& d, double gamma) {
  if (s.empty()) throw InvalidInput("smallest_consistent: empty seed set");
  if (!(gamma >= 0.0)) throw InvalidInput("smallest_consistent: gamma must be >= 0");
  std::vector<char> in(x.size(), 0);
  IndexList c;
  for (auto p : s) {
    if (p >= x.size()) throw InvalidInput("smallest_consistent: index out of range");
    if (!in[p]) {
      in[p] = 1;
      c.push_back(p);
    }
  }
  double diam = diameter(d, x, c);
  IndexList rest;
  std::vector<double> mind;
  for (auto y : universe) {
    if (in[y]) continue;
    double best = kInfinity;
    for (auto p : c) best = std::min(best, d.norm_of_difference(x[y], x[p]));
    rest.push_back(y);
    mind.push_back(best);
  }
  for (;;) {
    const double thr = closure_threshold(gamma, diam);
    IndexList added;
    IndexList keep;
    std::vector<double> keep_d;
    for (std::size_t t = 0; t < rest.size(); ++t) {
      if (mind[t] <= thr) {
        added.push_back(rest[t]);
      } else {
        keep.push_back(rest[t]);
        keep_d.push_back(mind[t]);
      }
    }
    if (added.empty()) break;
    for (std::size_t a = 0; a < added.size(); ++a) {
      for (auto p : c) diam = std::max(diam, d.norm_of_difference(x[added[a]], x[p]));
      for (std::size_t b = 0; b < a; ++b)
        diam = std::max(diam, d.norm_of_difference(x[added[a]], x[added[b]]));
    }
    for (std::size_t t = 0; t < keep.size(); ++t)
      for (auto p : added) keep_d[t] = std::min(keep_d[t], d.norm_of_difference(x[keep[t]], x[p]));
    for (auto p : added) {
      in[p] = 1;
      c.push_back(p);
    }
    rest.swap(keep);
    mind.swap(keep_d);
  }
  std::sort(c.begin(), c.end());
  return c;
}

inline IndexList smallest_consistent(const PointSet& x, const IndexList& s, const Pseudometric& d,
                                     double gamma) {
  return smallest_consistent(x, iota_indices(x.size()), s, d, gamma);
}

// Intersection of every superset of S in H, by enumeration. Refuses n > 20.
inline IndexList brute_force_smallest_consistent(const PointSet& x, const IndexList& s,
                                                 const Pseudometric& d, double gamma) {
  const std::size_t n = x.size();
  if (n > 20) throw InvalidInput("brute_force_smallest_consistent: n > 20 is not supported");
  if (s.empty()) throw InvalidInput("brute_force_smallest_consistent: empty seed set");
  std::uint32_t seed = 0;
  for (auto p : s) {
    if (p >= n) throw InvalidInput("brute_force_smallest_consistent: index out of range");
    seed |= 1u << p;
  }
  const std::uint32_t full = n == 32 ? ~0u : ((1u << n) - 1u);
  const std::uint32_t free_bits = full & ~seed;
  const IndexList universe = iota_indices(n);
  std::uint32_t meet = full;
  // enumerate subsets of free_bits
  for (std::uint32_t sub = free_bits;; sub = (sub - 1) & free_bits) {
    const std::uint32_t mask = seed | sub;
    // supersets of the running intersection cannot shrink it
    if ((mask & meet) != meet) {
      IndexList c;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1u) c.push_back(i);
      if (in_margin_class(x, universe, c, d, gamma)) meet &= mask;
    }
    if (sub == 0) break;
  }
  IndexList out;
  for (std::size_t i = 0; i < n; ++i)
    if (meet >> i & 1u) out.push_back(i);
  return out;
}

}  // namespace marginrec
