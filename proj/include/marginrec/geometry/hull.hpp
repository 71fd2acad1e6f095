#pragma once

#include "marginrec/core.hpp"
#include "marginrec/geometry/hull_lp.hpp"

#include <algorithm>
#include <vector>

namespace marginrec {

// x in conv(V) within tol (L1 residual of the barycentric system).
// Vertices of V are accepted exactly regardless of tol.
inline bool hull_contains(const PointSet& v, const Eigen::Ref<const Point>& x,
                          double tol = 1e-8) {
  if (v.empty()) throw InvalidInput("hull_contains: empty vertex set");
  if (!(tol > 0.0)) throw InvalidInput("hull_contains: tolerance must be positive");
  HullLp lp(v.matrix(), tol);
  return lp.contains(x);
}

// Membership in the homothetic copy z + (1+gamma)(conv(V) - z).
inline bool scaled_hull_contains(const PointSet& v, const Eigen::Ref<const Point>& z,
                                 double gamma, const Eigen::Ref<const Point>& x,
                                 double tol = 1e-8) {
  if (!(gamma >= 0.0)) throw InvalidInput("scaled_hull_contains: gamma must be >= 0");
  if (v.empty()) throw InvalidInput("scaled_hull_contains: empty vertex set");
  require_dim(z, v.dim(), "scaled_hull_contains");
  require_dim(x, v.dim(), "scaled_hull_contains");
  if (!z.allFinite()) throw InvalidInput("scaled_hull_contains: non-finite center");
  Point shrunk = z + (x - z) / (1.0 + gamma);
  return hull_contains(v, shrunk, tol);
}

// Max alpha >= 0 with x + alpha u in conv(V). u must be a unit vector.
inline double ray_hull_exit(const PointSet& v, const Eigen::Ref<const Point>& x,
                            const Eigen::Ref<const Point>& u, double tol = 1e-8) {
  if (v.empty()) throw InvalidInput("ray_hull_exit: empty vertex set");
  require_dim(u, v.dim(), "ray_hull_exit");
  if (std::abs(u.norm() - 1.0) > 1e-9) throw InvalidInput("ray_hull_exit: direction must be a unit vector");
  HullLp lp(v.matrix(), tol);
  return lp.ray_exit(x, u);
}

// Subset E of V with conv(E) = conv(V) (up to tol). Points strictly outside
// the running hull are kept, then a final pass drops any kept point that lies
// in the hull of the others. Seeding uses directional extremes, which are
// vertices of conv(V).
inline IndexList extreme_point_indices(const PointSet& v, double tol = 1e-8) {
  const std::size_t n = v.size();
  if (n <= 1) return iota_indices(n);
  const Eigen::Index m = static_cast<Eigen::Index>(v.dim());
  const Matrix& pts = v.matrix();

  std::vector<char> kept(n, 0);
  IndexList seed;
  auto add_extreme = [&](const Eigen::VectorXd& dir) {
    Eigen::VectorXd proj = dir.transpose() * pts;
    Eigen::Index hi = 0, lo = 0;
    proj.maxCoeff(&hi);
    proj.minCoeff(&lo);
    for (Eigen::Index idx : {hi, lo}) {
      if (!kept[static_cast<std::size_t>(idx)]) {
        kept[static_cast<std::size_t>(idx)] = 1;
        seed.push_back(static_cast<PointIndex>(idx));
      }
    }
  };
  for (Eigen::Index i = 0; i < m; ++i) add_extreme(Eigen::VectorXd::Unit(m, i));
  // fixed quasi-random directions keep this deterministic
  const int extra = static_cast<int>(8 * m);
  for (int t = 0; t < extra; ++t) {
    Eigen::VectorXd dir(m);
    for (Eigen::Index i = 0; i < m; ++i)
      dir[i] = std::sin(1.0 + 2.399963229728653 * (t + 1) * (i + 1) + 0.7 * i);
    if (dir.norm() > 0) add_extreme(dir);
  }

  IndexList hull = seed;
  auto gather = [&](const IndexList& idx) {
    Matrix out(m, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = pts.col(static_cast<Eigen::Index>(idx[j]));
    return out;
  };
  {
    HullLp lp(gather(hull), tol);
    for (std::size_t i = 0; i < n; ++i) {
      if (kept[i]) continue;
      if (!lp.contains(pts.col(static_cast<Eigen::Index>(i)))) {
        kept[i] = 1;
        hull.push_back(i);
        lp = HullLp(gather(hull), tol);
      }
    }
  }
  // cleanup: drop kept points that are not needed
  for (std::size_t pos = 0; pos < hull.size() && hull.size() > 1;) {
    IndexList others;
    others.reserve(hull.size() - 1);
    for (std::size_t j = 0; j < hull.size(); ++j)
      if (j != pos) others.push_back(hull[j]);
    HullLp lp(gather(others), tol);
    if (lp.contains(pts.col(static_cast<Eigen::Index>(hull[pos]))))
      hull.erase(hull.begin() + static_cast<std::ptrdiff_t>(pos));
    else
      ++pos;
  }
  std::sort(hull.begin(), hull.end());
  return hull;
}

inline PointSet extreme_points(const PointSet& v, double tol = 1e-8) {
  return v.subset(extreme_point_indices(v, tol));
}

// Predicate for the homothetic copy z + (1+gamma)(conv(V) - z), with the
// vertex set pre-scaled and a bounding-box pre-filter.
class ScaledHull {
 public:
  ScaledHull(const PointSet& v, const Point& z, double gamma, double tol = 1e-8)
      : z_(z), gamma_(gamma), tol_(tol), lp_(scaled(v, z, gamma), tol) {
    lo_ = lp_.vertices().rowwise().minCoeff();
    hi_ = lp_.vertices().rowwise().maxCoeff();
  }

  bool operator()(const Eigen::Ref<const Point>& x) {
    require_dim(x, lp_.dim(), "ScaledHull");
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (x[i] < lo_[i] - tol_ || x[i] > hi_[i] + tol_) return false;
    return lp_.contains(x);
  }

  const Point& center() const { return z_; }
  double gamma() const { return gamma_; }
  const Matrix& scaled_vertices() const { return lp_.vertices(); }

 private:
  static Matrix scaled(const PointSet& v, const Point& z, double gamma) {
    if (v.empty()) throw InvalidInput("ScaledHull: empty vertex set");
    require_dim(z, v.dim(), "ScaledHull");
    Matrix out = v.matrix();
    out = ((1.0 + gamma) * (out.colwise() - z)).colwise() + z;
    return out;
  }

  Point z_;
  double gamma_;
  double tol_;
  HullLp lp_;
  Eigen::VectorXd lo_, hi_;
};

}  // namespace marginrec
