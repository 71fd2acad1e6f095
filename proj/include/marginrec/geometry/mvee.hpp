#pragma once

#include "marginrec/core.hpp"

#include <algorithm>
#include <cmath>

namespace marginrec {

// Orthonormal frame of the affine span of a point set: x = origin + basis * y.
struct AffineFrame {
  Point origin;   // m
  Matrix basis;   // m x r, orthonormal columns
  std::size_t rank() const { return static_cast<std::size_t>(basis.cols()); }

  Matrix to_local(const Matrix& pts) const {
    return basis.transpose() * (pts.colwise() - origin);
  }
  Point to_ambient(const Eigen::Ref<const Point>& y) const { return origin + basis * y; }
};

// Rank cutoff: singular values below cutoff * largest are treated as zero.
inline AffineFrame affine_frame(const PointSet& v, double cutoff = 1e-9) {
  if (v.empty()) throw InvalidInput("affine_frame: empty point set");
  const Eigen::Index m = static_cast<Eigen::Index>(v.dim());
  AffineFrame f;
  f.origin = v.matrix().rowwise().mean();
  Matrix centered = v.matrix().colwise() - f.origin;
  if (v.size() == 1 || centered.cwiseAbs().maxCoeff() == 0.0) {
    f.basis = Matrix(m, 0);
    return f;
  }
  Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double top = sv.size() ? sv[0] : 0.0;
  Eigen::Index r = 0;
  while (r < sv.size() && sv[r] > cutoff * top) ++r;
  f.basis = svd.matrixU().leftCols(r);
  return f;
}

// Ellipsoid {x in origin + span(basis) : (y - c)^T A (y - c) <= 1}, with y
// the local coordinates of x in the affine frame.
struct Ellipsoid {
  AffineFrame frame;
  Point local_center;   // r
  Matrix shape;         // r x r, SPD
  // Radius factor between the enclosing ellipsoid and the inscribed copy
  // certified by the computed weights; equals the rank for the exact MVEE.
  double john_factor = 0.0;

  std::size_t rank() const { return frame.rank(); }
  Point center() const { return frame.to_ambient(local_center); }

  // Quadratic form of x's projection plus a flag if x leaves the span.
  double level(const Eigen::Ref<const Point>& x, double* off_span = nullptr) const {
    Point y = frame.basis.transpose() * (x - frame.origin);
    if (off_span) *off_span = (frame.to_ambient(y) - x).norm();
    Point dy = y - local_center;
    return rank() == 0 ? 0.0 : dy.dot(shape * dy);
  }

  // Full m x m shape matrix B A B^T (rank r).
  Matrix ambient_shape() const { return frame.basis * shape * frame.basis.transpose(); }

  // Boundary point of the copy shrunk by `shrink` about the center, in the
  // direction `local_dir` (r-vector, need not be unit).
  Point boundary_point(const Eigen::Ref<const Point>& local_dir, double shrink = 1.0) const {
    if (rank() == 0) return center();
    double q = local_dir.dot(shape * local_dir);
    Point y = local_center + local_dir / (std::sqrt(q) * shrink);
    return frame.to_ambient(y);
  }
};

struct MveeStats {
  int iterations = 0;
  double max_level = 0.0;  // stopping statistic max_j M_j / (r + 1)
};

// (1+eps)-approximate minimum-volume enclosing ellipsoid via Khachiyan's
// first-order weight updates, computed in the affine span of V. The returned
// shape is rescaled so every input point has level <= 1.
inline Ellipsoid mvee(const PointSet& v, double eps = 1e-3, double cutoff = 1e-9,
                      MveeStats* stats = nullptr, int max_iter = 200000) {
  if (v.empty()) throw InvalidInput("mvee: empty point set");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("mvee: eps must be in (0,1)");
  Ellipsoid e;
  e.frame = affine_frame(v, cutoff);
  const Eigen::Index r = static_cast<Eigen::Index>(e.rank());
  if (r == 0) {
    e.local_center = Point(0);
    e.shape = Matrix(0, 0);
    e.john_factor = 0.0;
    if (stats) *stats = {};
    return e;
  }
  const Matrix q = e.frame.to_local(v.matrix());
  const Eigen::Index n = q.cols();
  Matrix lifted(r + 1, n);
  lifted.topRows(r) = q;
  lifted.row(r).setOnes();

  Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  const double d1 = static_cast<double>(r + 1);
  int it = 0;
  double max_m = 0.0;
  for (; it < max_iter; ++it) {
    Matrix x = lifted * u.asDiagonal() * lifted.transpose();
    Eigen::LLT<Matrix> llt(x);
    Matrix solved = llt.solve(lifted);
    Eigen::VectorXd mdist = (lifted.cwiseProduct(solved)).colwise().sum().transpose();
    Eigen::Index j = 0;
    max_m = mdist.maxCoeff(&j);
    if (max_m <= (1.0 + eps) * d1) break;
    double step = (max_m - d1) / (d1 * (max_m - 1.0));
    u *= (1.0 - step);
    u[j] += step;
  }
  if (stats) {
    stats->iterations = it;
    stats->max_level = max_m / d1;
  }
  Point c = q * u;
  Matrix centered = q.colwise() - c;
  Matrix sigma = centered * u.asDiagonal() * centered.transpose();
  Matrix sigma_inv = sigma.ldlt().solve(Matrix::Identity(r, r));
  sigma_inv = 0.5 * (sigma_inv + sigma_inv.transpose());
  double worst = 0.0;
  for (Eigen::Index k = 0; k < n; ++k)
    worst = std::max(worst, centered.col(k).dot(sigma_inv * centered.col(k)));
  e.local_center = c;
  e.shape = sigma_inv / worst;
  e.john_factor = worst;
  return e;
}

// Affine map x -> linear * x + offset onto R^rank, invertible on its image.
struct AffineMap {
  Matrix linear;   // r x m
  Point offset;    // r
  std::size_t rank = 0;
  // inverse on the image: x = inv_linear * y + inv_origin
  Matrix inv_linear;  // m x r
  Point inv_origin;   // m

  Point apply(const Eigen::Ref<const Point>& x) const { return linear * x + offset; }
  Matrix apply_all(const Matrix& pts) const { return (linear * pts).colwise() + offset; }
  Point invert(const Eigen::Ref<const Point>& y) const {
    return inv_linear * y + inv_origin;
  }
};

struct IsotropicResult {
  AffineMap map;
  PointSet image;
  Ellipsoid ellipsoid;
};

// Reduce to the affine span, then send the MVEE to the unit ball at the origin.
inline IsotropicResult isotropic_transform(const PointSet& v, double eps = 1e-3,
                                           double cutoff = 1e-9) {
  Ellipsoid e = mvee(v, eps, cutoff);
  const Eigen::Index r = static_cast<Eigen::Index>(e.rank());
  const Eigen::Index m = static_cast<Eigen::Index>(v.dim());
  IsotropicResult out;
  out.ellipsoid = e;
  AffineMap& f = out.map;
  f.rank = static_cast<std::size_t>(r);
  if (r == 0) {
    f.linear = Matrix(0, m);
    f.offset = Point(0);
    f.inv_linear = Matrix(m, 0);
    f.inv_origin = e.frame.origin;
    out.image = PointSet(Matrix(0, static_cast<Eigen::Index>(v.size())));
    return out;
  }
  // shape = L L^T, y -> L^T (y - c) maps the ellipsoid to the unit ball
  Eigen::LLT<Matrix> llt(e.shape);
  Matrix lt = llt.matrixU();  // L^T
  f.linear = lt * e.frame.basis.transpose();
  f.offset = -lt * (e.frame.basis.transpose() * e.frame.origin + e.local_center);
  Matrix lt_inv = lt.triangularView<Eigen::Upper>().solve(Matrix::Identity(r, r));
  f.inv_linear = e.frame.basis * lt_inv;
  // x = origin + B (c + L^{-T} w)
  f.inv_origin = e.frame.origin + e.frame.basis * e.local_center;
  out.image = PointSet(f.apply_all(v.matrix()));
  return out;
}

}  // namespace marginrec
