#pragma once

#include "marginrec/core.hpp"
#include "marginrec/geometry/pseudometric.hpp"
#include "marginrec/margins.hpp"
#include "marginrec/oracle.hpp"
#include "marginrec/sampling/random.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace marginrec {

struct Instance {
  PointSet points;
  Clustering truth;
  std::vector<Pseudometric> metrics;  // empty or one per cluster
  std::map<std::string, double> certified;
  std::string generator;
  std::map<std::string, double> params;
  std::uint64_t seed = 0;
  std::vector<Point> centers;  // for center-based generators

  std::size_t dim() const { return points.dim(); }
  std::size_t size() const { return points.size(); }
  int k() const { return truth.k(); }

  bool operator==(const Instance& o) const {
    if (!(points == o.points) || !(truth == o.truth) || generator != o.generator ||
        params != o.params || seed != o.seed || certified != o.certified ||
        metrics.size() != o.metrics.size() || centers.size() != o.centers.size())
      return false;
    for (std::size_t i = 0; i < metrics.size(); ++i)
      if (!(metrics[i] == o.metrics[i])) return false;
    for (std::size_t i = 0; i < centers.size(); ++i)
      if (centers[i] != o.centers[i]) return false;
    return true;
  }
};

// Columns: `count` vertices of a regular simplex centred at the origin with
// the given circumradius, in dimension dim >= count - 1 (zero padded).
inline Matrix regular_simplex(std::size_t count, double circumradius, std::size_t dim) {
  if (count == 0) throw InvalidInput("regular_simplex: need at least one vertex");
  if (dim + 1 < count) throw InvalidInput("regular_simplex: dimension too small");
  const Eigen::Index mcount = static_cast<Eigen::Index>(count);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim), mcount);
  if (count == 1) return out;
  // Helmert basis of the sum-zero hyperplane of R^count
  for (Eigen::Index j = 1; j < mcount; ++j) {
    const double norm = std::sqrt(static_cast<double>(j * (j + 1)));
    for (Eigen::Index i = 0; i < mcount; ++i) {
      double h = i < j ? 1.0 : (i == j ? -static_cast<double>(j) : 0.0);
      out(j - 1, i) = h / norm;  // coordinate of e_i - mean along h_j
    }
  }
  const double raw = std::sqrt(static_cast<double>(count - 1) / static_cast<double>(count));
  return out * (circumradius / raw);
}

namespace detail {

inline Point uniform_in_ball(const Point& center, double radius, RandomSource& rng) {
  const Eigen::Index m = center.size();
  Point dir = rng.unit_vector(m);
  double r = radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(m));
  return center + r * dir;
}

inline std::vector<Pseudometric> euclidean_metrics(std::size_t dim, int k) {
  return std::vector<Pseudometric>(static_cast<std::size_t>(k), Pseudometric::euclidean(dim));
}

// Round-robin labels 1..k, so sizes differ by at most one.
inline std::vector<ClusterId> round_robin(std::size_t n, int k) {
  std::vector<ClusterId> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<ClusterId>(i % static_cast<std::size_t>(k)) + 1;
  return labels;
}

}  // namespace detail

// k balls of unit diameter with centre distance >= 1 + gamma + 0.1, so
// hull distances exceed gamma + 0.1 while diameters are at most 1. Centres
// are drawn in a cube and fall back to a grid. A positive `box` bounds the
// cube side; infeasible boxes are refused.
inline Instance gen_convex_margin(std::size_t m, int k, std::size_t n, double gamma,
                                  RandomSource& rng, double box = 0.0) {
  if (m < 1) throw InvalidInput("gen_convex_margin: m must be >= 1");
  if (k < 1) throw InvalidInput("gen_convex_margin: k must be >= 1");
  if (n < static_cast<std::size_t>(k)) throw InvalidInput("gen_convex_margin: n must be >= k");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidInput("gen_convex_margin: gamma must be positive");
  const double sep = 1.0 + gamma + 0.1;
  const Eigen::Index md = static_cast<Eigen::Index>(m);
  const auto per_axis = static_cast<std::size_t>(
      std::ceil(std::pow(static_cast<double>(k), 1.0 / static_cast<double>(m)) - 1e-12));
  const double grid_side = sep * static_cast<double>(per_axis - 1);
  const double side = box > 0.0 ? box : std::max(grid_side, sep) * 1.5;

  std::vector<Point> centers;
  RandomSource place = rng.fork("centers");
  for (int attempt = 0; attempt < 200 && static_cast<int>(centers.size()) < k; ++attempt) {
    centers.clear();
    for (int tries = 0; tries < 2000 && static_cast<int>(centers.size()) < k; ++tries) {
      Point c(md);
      for (Eigen::Index i = 0; i < md; ++i) c[i] = place.uniform(0.0, side);
      bool ok = true;
      for (const auto& o : centers)
        if ((o - c).norm() < sep) {
          ok = false;
          break;
        }
      if (ok) centers.push_back(c);
    }
  }
  if (static_cast<int>(centers.size()) < k) {
    if (grid_side > side + 1e-12)
      throw PreconditionError("gen_convex_margin: cannot place " + std::to_string(k) +
                              " unit-diameter balls at separation " + std::to_string(sep) +
                              " inside a cube of side " + std::to_string(side) + " in dimension " +
                              std::to_string(m));
    centers.clear();
    for (int c = 0; c < k; ++c) {
      Point p(md);
      std::size_t rest = static_cast<std::size_t>(c);
      for (Eigen::Index i = 0; i < md; ++i) {
        p[i] = sep * static_cast<double>(rest % per_axis);
        rest /= per_axis;
      }
      centers.push_back(p);
    }
  }

  for (int attempt = 0; attempt < 10; ++attempt) {
    RandomSource draw = rng.fork("points" + std::to_string(attempt));
    auto labels = detail::round_robin(n, k);
    std::vector<Point> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      pts.push_back(detail::uniform_in_ball(centers[static_cast<std::size_t>(labels[i] - 1)], 0.5, draw));
    Instance inst;
    inst.points = PointSet(m, pts);
    inst.truth = Clustering(labels, k);
    inst.metrics = detail::euclidean_metrics(m, k);
    auto check = verify_convex_hull_margin(inst.points, inst.truth, inst.metrics, gamma);
    if (!check.satisfied) continue;
    inst.certified["convex_hull"] = check.min_ratio;
    inst.generator = "convex-margin";
    inst.params = {{"m", static_cast<double>(m)}, {"k", static_cast<double>(k)},
                   {"n", static_cast<double>(n)}, {"gamma", gamma}};
    if (box > 0.0) inst.params["box"] = box;
    inst.seed = rng.seed();
    inst.centers = centers;
    return inst;
  }
  throw PreconditionError("gen_convex_margin: margin verification failed repeatedly");
}

// Largest gamma the packing construction supports for a given size.
inline double packing_gamma_limit(std::size_t size) {
  return std::sqrt(static_cast<double>(size) / (2.0 * static_cast<double>(size - 1)));
}

// Regular simplex of `size` vertices (circumradius r = 1, dimension size-1):
// pairwise distance sqrt(2 size / (size-1)) > 2 gamma r. Clustering ({x}, X\x)
// with x chosen by the seed unless `singleton` is given.
inline Instance gen_packing_instance(std::size_t size, double gamma, RandomSource& rng,
                                     long singleton = -1) {
  if (size < 2) throw InvalidInput("gen_packing_instance: size must be >= 2");
  if (!(gamma > 0.0)) throw InvalidInput("gen_packing_instance: gamma must be positive");
  if (!(gamma < packing_gamma_limit(size)))
    throw PreconditionError("gen_packing_instance: gamma must be below " +
                            std::to_string(packing_gamma_limit(size)) + " for size " +
                            std::to_string(size));
  const std::size_t m = size - 1;
  Matrix v = regular_simplex(size, 1.0, m);
  std::size_t x = singleton >= 0 ? static_cast<std::size_t>(singleton)
                                 : static_cast<std::size_t>(rng.uniform_index(size));
  if (x >= size) throw InvalidInput("gen_packing_instance: singleton index out of range");
  std::vector<ClusterId> labels(size, 2);
  labels[x] = 1;
  Instance inst;
  inst.points = PointSet(v);
  inst.truth = Clustering(labels, 2);
  inst.metrics = detail::euclidean_metrics(m, 2);
  auto ova = ova_margin(inst.points, inst.truth, inst.metrics);
  if (!(ova.min > gamma)) throw Error("gen_packing_instance: margin certificate failed");
  inst.certified["ova"] = ova.min;
  inst.generator = "packing";
  inst.params = {{"size", static_cast<double>(size)}, {"gamma", gamma},
                 {"singleton", static_cast<double>(x)}};
  inst.seed = rng.seed();
  return inst;
}

// Best normalised linear separation of two clusters in the plane, scanning
// `steps` directions of the half circle.
inline double scan_linear_ratio(const PointSet& x, const Clustering& c, int steps = 36000) {
  const double phi = diameter(Pseudometric::euclidean(x.dim()), x);
  if (phi == 0.0) return 0.0;
  double best = 0.0;
  for (int t = 0; t < steps; ++t) {
    double th = 3.141592653589793 * t / steps;
    Point w(2);
    w << std::cos(th), std::sin(th);
    double lo[2] = {kInfinity, kInfinity}, hi[2] = {-kInfinity, -kInfinity};
    for (std::size_t i = 0; i < x.size(); ++i) {
      double v = w.dot(x[i]);
      int g = c[i] - 1;
      lo[g] = std::min(lo[g], v);
      hi[g] = std::max(hi[g], v);
    }
    best = std::max({best, lo[1] - hi[0], lo[0] - hi[1]});
  }
  return best / phi;
}

// Four points p1 = eta e1, q1 = a e1, p2 = eta e2, q2 = a e2 with C1 = {p1,q1};
// cluster 1 uses the projection onto e2 and cluster 2 the projection onto e1.
inline Instance gen_svm_vs_ova(double eta, double a, RandomSource& rng) {
  if (!(eta > 0.0 && eta < a) || !std::isfinite(a))
    throw InvalidInput("gen_svm_vs_ova: need 0 < eta < a");
  Instance inst;
  inst.points = PointSet::from_rows({{eta, 0.0}, {a, 0.0}, {0.0, eta}, {0.0, a}});
  inst.truth = Clustering({1, 1, 2, 2}, 2);
  Matrix e1(2, 1), e2(2, 1);
  e1 << 1.0, 0.0;
  e2 << 0.0, 1.0;
  inst.metrics = {Pseudometric::projection(e2), Pseudometric::projection(e1)};
  auto ova = ova_margin(inst.points, inst.truth, inst.metrics);
  if (!std::isinf(ova.min)) throw Error("gen_svm_vs_ova: margin certificate failed");
  const double phi = diameter(Pseudometric::euclidean(2), inst.points);
  const double bound = eta * std::sqrt(2.0) / phi;
  const double measured = scan_linear_ratio(inst.points, inst.truth);
  if (measured > bound * (1.0 + 1e-9)) throw Error("gen_svm_vs_ova: linear ratio exceeds bound");
  inst.certified["ova"] = ova.min;
  inst.certified["linear_ratio"] = measured;
  inst.certified["linear_ratio_bound"] = bound;
  inst.generator = "svm-vs-ova";
  inst.params = {{"eta", eta}, {"a", a}};
  inst.seed = rng.seed();
  return inst;
}

// Unit ball B at the origin and a sphere S of radius r' whose centre lies on
// the e1 axis. `size` points sit on a great circle of S at spacing 2 pi/size;
// x is the one farthest from the origin. S is placed so the cap S \ B has
// angular radius pi/size around x, hence every other point is inside B and
// adjacent points are farther apart than eta = sup_{y in S\B} |x - y|.
inline Instance gen_sphere_coslice(std::size_t m, std::size_t size, RandomSource& rng,
                                   double r_prime = 0.01) {
  if (m < 2) throw InvalidInput("gen_sphere_coslice: m must be >= 2");
  if (size < 3) throw InvalidInput("gen_sphere_coslice: size must be >= 3");
  if (!(r_prime > 0.0 && r_prime < 1.0)) throw InvalidInput("gen_sphere_coslice: r' must be in (0,1)");
  const double pi = 3.141592653589793;
  const double cap = pi / static_cast<double>(size);
  const double a =
      -r_prime * std::cos(cap) + std::sqrt(1.0 - r_prime * r_prime * std::sin(cap) * std::sin(cap));
  const double rho = a + r_prime - 1.0;
  const double eta = 2.0 * r_prime * std::sin(cap / 2.0);
  const Eigen::Index md = static_cast<Eigen::Index>(m);
  Matrix pts = Matrix::Zero(md, static_cast<Eigen::Index>(size));
  for (std::size_t i = 0; i < size; ++i) {
    double th = 2.0 * pi * static_cast<double>(i) / static_cast<double>(size);
    pts(0, static_cast<Eigen::Index>(i)) = a + r_prime * std::cos(th);
    pts(1, static_cast<Eigen::Index>(i)) = r_prime * std::sin(th);
  }
  std::vector<ClusterId> labels(size, 2);
  labels[0] = 1;
  Instance inst;
  inst.points = PointSet(pts);
  inst.truth = Clustering(labels, 2);
  inst.metrics = detail::euclidean_metrics(m, 2);
  for (std::size_t i = 1; i < size; ++i)
    if (!(inst.points[i].norm() <= 1.0 + 1e-12)) throw Error("gen_sphere_coslice: point outside B");
  auto ova = ova_margin(inst.points, inst.truth, inst.metrics);
  inst.certified["ova"] = ova.min;
  inst.certified["eta"] = eta;
  inst.certified["rho"] = rho;
  inst.generator = "sphere-coslice";
  inst.params = {{"m", static_cast<double>(m)}, {"size", static_cast<double>(size)},
                 {"r_prime", r_prime}};
  inst.seed = rng.seed();
  return inst;
}

// k centres of a regular simplex with side D = 1; points uniform within
// rho = 0.9 D / (1 + alpha) of their centre, so every ratio
// d(x, c_j) / d(x, c_i) >= (D - rho) / rho > alpha.
inline Instance gen_center_proximity(std::size_t m, int k, std::size_t n, double alpha,
                                     RandomSource& rng) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) throw InvalidInput("gen_center_proximity: alpha must be > 1");
  if (m < 1 || k < 1) throw InvalidInput("gen_center_proximity: m and k must be >= 1");
  if (n < static_cast<std::size_t>(k)) throw InvalidInput("gen_center_proximity: n must be >= k");
  if (static_cast<std::size_t>(k) > m + 1)
    throw PreconditionError("gen_center_proximity: " + std::to_string(k) +
                            " equidistant centres do not fit in dimension " + std::to_string(m));
  const double side = 1.0;
  const double circum = k > 1 ? side * std::sqrt((k - 1.0) / (2.0 * k)) : 0.0;
  Matrix cm = regular_simplex(static_cast<std::size_t>(k), circum, m);
  std::vector<Point> centers;
  for (int i = 0; i < k; ++i) centers.push_back(cm.col(i));
  const double rho = 0.9 * side / (1.0 + alpha);
  auto labels = detail::round_robin(n, k);
  std::vector<Point> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    pts.push_back(detail::uniform_in_ball(centers[static_cast<std::size_t>(labels[i] - 1)], rho, rng));
  Instance inst;
  inst.points = PointSet(m, pts);
  inst.truth = Clustering(labels, k);
  inst.metrics = detail::euclidean_metrics(m, k);
  inst.centers = centers;
  const double measured = center_proximity_alpha(inst.points, inst.truth, centers, Pseudometric::euclidean(m));
  if (!(measured >= alpha)) throw Error("gen_center_proximity: proximity certificate failed");
  inst.certified["center_alpha"] = measured;
  inst.certified["ova"] = ova_margin(inst.points, inst.truth, inst.metrics).min;
  inst.generator = "center-proximity";
  inst.params = {{"m", static_cast<double>(m)}, {"k", static_cast<double>(k)},
                 {"n", static_cast<double>(n)}, {"alpha", alpha}};
  inst.seed = rng.seed();
  return inst;
}

}  // namespace marginrec
