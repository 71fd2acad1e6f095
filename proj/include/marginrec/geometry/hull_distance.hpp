#pragma once

#include "marginrec/core.hpp"
#include "marginrec/geometry/hull_lp.hpp"
#include "marginrec/geometry/pseudometric.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace marginrec {

struct HullDistanceResult {
  double value = 0.0;        // distance of the final iterate (upper bound)
  double lower_bound = 0.0;  // duality bound min_j <y, p_j> / |y|
  int iterations = 0;
};

namespace detail {

// Wolfe's min-norm-point method on the columns of P (q x n): minimise
// |P lambda| over the simplex. Stops when the relative duality gap
// (|y|^2 - min_j <y,p_j>) / |y|^2 drops to tol.
inline HullDistanceResult min_norm_point(const Matrix& p, double tol, int max_major) {
  const Eigen::Index n = p.cols();
  HullDistanceResult out;
  double scale = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) scale = std::max(scale, p.col(j).squaredNorm());
  if (scale == 0.0) return out;
  const double zero_level = 1e-26 * scale;

  Eigen::Index first = 0;
  p.colwise().squaredNorm().minCoeff(&first);
  std::vector<Eigen::Index> active{first};
  std::vector<double> w{1.0};
  Point y = p.col(first);

  auto finish = [&](HullDistanceResult& r) {
    const double yn = y.norm();
    r.value = yn;
    if (yn == 0.0) {
      r.lower_bound = 0.0;
      return;
    }
    double lo = kInfinity;
    for (Eigen::Index j = 0; j < n; ++j) lo = std::min(lo, y.dot(p.col(j)));
    r.lower_bound = std::clamp(lo / yn, 0.0, yn);
  };

  for (int major = 0; major < max_major; ++major) {
    out.iterations = major + 1;
    const double yy = y.squaredNorm();
    if (yy <= zero_level) {
      y.setZero();
      finish(out);
      return out;
    }
    Eigen::Index j = 0;
    (y.transpose() * p).minCoeff(&j);
    const double gap = yy - y.dot(p.col(j));
    if (gap <= tol * yy) {
      finish(out);
      return out;
    }
    if (std::find(active.begin(), active.end(), j) != active.end()) {
      // numerical stall: the best vertex is already active
      finish(out);
      return out;
    }
    active.push_back(j);
    w.push_back(0.0);

    for (int minor = 0; minor < 4 * static_cast<int>(p.rows() + n) + 10; ++minor) {
      const Eigen::Index s = static_cast<Eigen::Index>(active.size());
      Matrix kkt = Matrix::Zero(s + 1, s + 1);
      for (Eigen::Index a = 0; a < s; ++a) {
        for (Eigen::Index b = a; b < s; ++b) {
          double g = p.col(active[a]).dot(p.col(active[b]));
          kkt(a, b) = kkt(b, a) = g;
        }
        kkt(a, s) = kkt(s, a) = 1.0;
      }
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
      rhs[s] = 1.0;
      Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
      Eigen::VectorXd alpha = sol.head(s);

      if ((alpha.array() > 1e-14).all()) {
        for (Eigen::Index a = 0; a < s; ++a) w[static_cast<std::size_t>(a)] = alpha[a];
        break;
      }
      double theta = 1.0;
      for (Eigen::Index a = 0; a < s; ++a) {
        if (alpha[a] <= 1e-14) {
          double wa = w[static_cast<std::size_t>(a)];
          double denom = wa - alpha[a];
          if (denom > 0.0) theta = std::min(theta, wa / denom);
        }
      }
      std::vector<Eigen::Index> keep_idx;
      std::vector<double> keep_w;
      for (Eigen::Index a = 0; a < s; ++a) {
        double nw = (1.0 - theta) * w[static_cast<std::size_t>(a)] + theta * alpha[a];
        if (nw > 1e-14) {
          keep_idx.push_back(active[static_cast<std::size_t>(a)]);
          keep_w.push_back(nw);
        }
      }
      if (keep_idx.empty()) {
        keep_idx.push_back(j);
        keep_w.push_back(1.0);
      }
      double total = 0.0;
      for (double v : keep_w) total += v;
      for (double& v : keep_w) v /= total;
      active.swap(keep_idx);
      w.swap(keep_w);
    }
    y.setZero();
    for (std::size_t a = 0; a < active.size(); ++a) y += w[a] * p.col(active[a]);
  }
  finish(out);
  throw ConvergenceError("hull_distance: iteration cap reached", out.value);
}

}  // namespace detail

// Full result of min over the simplex of d(x, V lambda).
inline HullDistanceResult hull_distance_result(const Pseudometric& d, const PointSet& v,
                                               const Eigen::Ref<const Point>& x,
                                               double tol = 1e-6, int max_iter = 10000) {
  if (v.empty()) throw InvalidInput("hull_distance: empty vertex set");
  if (v.dim() != d.dim()) throw InvalidInput("hull_distance: dimension mismatch");
  require_dim(x, d.dim(), "hull_distance");
  if (!(tol > 0.0)) throw InvalidInput("hull_distance: tolerance must be positive");
  if (HullLp(v.matrix()).contains(x)) return {};
  Matrix p = d.factor() * (v.matrix().colwise() - x);
  return detail::min_norm_point(p, tol, max_iter);
}

inline double hull_distance(const Pseudometric& d, const PointSet& v,
                            const Eigen::Ref<const Point>& x, double tol = 1e-6) {
  return hull_distance_result(d, v, x, tol).value;
}

}  // namespace marginrec
