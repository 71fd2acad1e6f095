#pragma once

#include "marginrec/core.hpp"

#include <algorithm>
#include <string>

namespace marginrec {

// Seminorm-induced pseudometric d(x,y) = ||L (x - y)||_2.
//
// euclidean:    L = I
// mahalanobis:  L = Lambda^{1/2} Q^T where W = Q Lambda Q^T (PSD)
// projection:   L = B^T, rows of L are an orthonormal basis of the subspace
//
// The mahalanobis value is the square root of the quadratic form so that the
// triangle inequality holds.
class Pseudometric {
 public:
  enum class Kind { euclidean, mahalanobis, projection };

  static Pseudometric euclidean(std::size_t dim) {
    Pseudometric d;
    d.kind_ = Kind::euclidean;
    d.dim_ = dim;
    d.factor_ = Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    return d;
  }

  static Pseudometric mahalanobis(const Matrix& w, double tol = 1e-9) {
    if (w.rows() != w.cols()) throw InvalidInput("mahalanobis: W must be square");
    if (!w.allFinite()) throw InvalidInput("mahalanobis: W has non-finite entries");
    double asym = (w - w.transpose()).cwiseAbs().maxCoeff();
    if (w.size() > 0 && asym > tol) throw InvalidInput("mahalanobis: W is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (w + w.transpose()));
    const auto& ev = es.eigenvalues();
    if (ev.size() > 0 && ev.minCoeff() < -tol)
      throw InvalidInput("mahalanobis: W is not positive semidefinite (eigenvalue " +
                         std::to_string(ev.minCoeff()) + ")");
    Pseudometric d;
    d.kind_ = Kind::mahalanobis;
    d.dim_ = static_cast<std::size_t>(w.rows());
    d.weight_ = w;
    Eigen::VectorXd root = ev.cwiseMax(0.0).cwiseSqrt();
    d.factor_ = root.asDiagonal() * es.eigenvectors().transpose();
    return d;
  }

  // basis: dim x r, columns orthonormal
  static Pseudometric projection(const Matrix& basis, double tol = 1e-9) {
    if (!basis.allFinite()) throw InvalidInput("projection: basis has non-finite entries");
    if (basis.cols() > 0) {
      Matrix gram = basis.transpose() * basis;
      double err = (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
      if (err > tol) throw InvalidInput("projection: basis vectors are not orthonormal");
    }
    Pseudometric d;
    d.kind_ = Kind::projection;
    d.dim_ = static_cast<std::size_t>(basis.rows());
    d.basis_ = basis;
    d.factor_ = basis.transpose();
    return d;
  }

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  // W for mahalanobis, empty otherwise
  const Matrix& weight() const { return weight_; }
  // B (dim x r) for projection, empty otherwise
  const Matrix& basis() const { return basis_; }
  // Linear factor L with d(x,y) = ||L(x-y)||.
  const Matrix& factor() const { return factor_; }

  double operator()(const Eigen::Ref<const Point>& x, const Eigen::Ref<const Point>& y) const {
    require_dim(x, dim_, "distance");
    require_dim(y, dim_, "distance");
    return norm_of_difference(x, y);
  }

  // No dimension checks; callers guarantee shapes.
  double norm_of_difference(const Eigen::Ref<const Point>& x,
                            const Eigen::Ref<const Point>& y) const {
    if (kind_ == Kind::euclidean) return (x - y).norm();
    return (factor_ * (x - y)).norm();
  }

  std::string kind_name() const {
    switch (kind_) {
      case Kind::euclidean: return "euclidean";
      case Kind::mahalanobis: return "mahalanobis";
      case Kind::projection: return "projection";
    }
    return "?";
  }

  bool operator==(const Pseudometric& o) const {
    if (kind_ != o.kind_ || dim_ != o.dim_) return false;
    if (kind_ == Kind::mahalanobis) return weight_ == o.weight_;
    if (kind_ == Kind::projection)
      return basis_.cols() == o.basis_.cols() && basis_ == o.basis_;
    return true;
  }

 private:
  Kind kind_ = Kind::euclidean;
  std::size_t dim_ = 0;
  Matrix weight_;
  Matrix basis_;
  Matrix factor_;
};

inline double distance(const Pseudometric& d, const Eigen::Ref<const Point>& x,
                       const Eigen::Ref<const Point>& y) {
  return d(x, y);
}

// Max pairwise distance; 0 for empty and singleton sets.
inline double diameter(const Pseudometric& d, const PointSet& x, const IndexList& subset) {
  double best = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a)
    for (std::size_t b = a + 1; b < subset.size(); ++b)
      best = std::max(best, d.norm_of_difference(x[subset[a]], x[subset[b]]));
  return best;
}

inline double diameter(const Pseudometric& d, const PointSet& s) {
  if (!s.empty() && s.dim() != d.dim()) throw InvalidInput("diameter: dimension mismatch");
  return diameter(d, s, iota_indices(s.size()));
}

// Min cross distance; infinity when either side is empty.
inline double set_distance(const Pseudometric& d, const PointSet& x, const IndexList& u,
                           const IndexList& s) {
  double best = kInfinity;
  for (PointIndex a : u)
    for (PointIndex b : s) best = std::min(best, d.norm_of_difference(x[a], x[b]));
  return best;
}

inline double set_distance(const Pseudometric& d, const PointSet& u, const PointSet& s) {
  if (u.empty() || s.empty()) return kInfinity;
  if (u.dim() != d.dim() || s.dim() != d.dim())
    throw InvalidInput("set_distance: dimension mismatch");
  double best = kInfinity;
  for (std::size_t a = 0; a < u.size(); ++a)
    for (std::size_t b = 0; b < s.size(); ++b)
      best = std::min(best, d.norm_of_difference(u[a], s[b]));
  return best;
}

}  // namespace marginrec
