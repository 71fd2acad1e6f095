#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace marginrec {

using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using PointIndex = std::size_t;
using ClusterId = int;
using IndexList = std::vector<PointIndex>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Error hierarchy. Everything thrown by the library derives from Error.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidInput : Error {
  using Error::Error;
};

struct PreconditionError : Error {
  using Error::Error;
};

struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, double best)
      : Error(what), best_value(best) {}
  double best_value;
};

// Numeric tolerances shared across modules.
struct Tolerances {
  double lp_feasibility = 1e-8;
  // relative cutoff for affine-span rank detection
  double rank_cutoff = 1e-9;
  // slack applied to the strict inequalities of the margin definitions
  double strictness = 1e-9;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

// Finite list of m-dimensional points with stable indices 0..n-1.
// Stored column-wise: column i is point i.
class PointSet {
 public:
  PointSet() = default;

  explicit PointSet(Matrix columns) : coords_(std::move(columns)) {
    for (Eigen::Index j = 0; j < coords_.cols(); ++j)
      for (Eigen::Index i = 0; i < coords_.rows(); ++i)
        if (!std::isfinite(coords_(i, j)))
          throw InvalidInput("PointSet: non-finite coordinate in point " +
                             std::to_string(j));
  }

  PointSet(std::size_t dim, const std::vector<Point>& points)
      : coords_(static_cast<Eigen::Index>(dim),
                static_cast<Eigen::Index>(points.size())) {
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (static_cast<std::size_t>(points[j].size()) != dim)
        throw InvalidInput("PointSet: point " + std::to_string(j) +
                           " has dimension " +
                           std::to_string(points[j].size()) + ", expected " +
                           std::to_string(dim));
      coords_.col(static_cast<Eigen::Index>(j)) = points[j];
    }
    *this = PointSet(std::move(coords_));
  }

  static PointSet from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    std::vector<Point> pts;
    std::size_t dim = rows.size() ? rows.begin()->size() : 0;
    for (auto r : rows) {
      Point p(static_cast<Eigen::Index>(r.size()));
      Eigen::Index i = 0;
      for (double v : r) p[i++] = v;
      pts.push_back(std::move(p));
    }
    return PointSet(dim, pts);
  }

  std::size_t size() const { return static_cast<std::size_t>(coords_.cols()); }
  std::size_t dim() const { return static_cast<std::size_t>(coords_.rows()); }
  bool empty() const { return coords_.cols() == 0; }

  auto operator[](PointIndex i) const { return coords_.col(static_cast<Eigen::Index>(i)); }
  Point point(PointIndex i) const { return coords_.col(static_cast<Eigen::Index>(i)); }

  const Matrix& matrix() const { return coords_; }

  PointSet subset(const IndexList& idx) const {
    Matrix out(coords_.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) {
      if (idx[j] >= size()) throw InvalidInput("PointSet::subset: index out of range");
      out.col(static_cast<Eigen::Index>(j)) = coords_.col(static_cast<Eigen::Index>(idx[j]));
    }
    PointSet s;
    s.coords_ = std::move(out);
    return s;
  }

  bool operator==(const PointSet& o) const {
    return coords_.rows() == o.coords_.rows() && coords_.cols() == o.coords_.cols() &&
           coords_ == o.coords_;
  }

 private:
  Matrix coords_;
};

inline void require_dim(const Eigen::Ref<const Point>& x, std::size_t dim, const char* what) {
  if (static_cast<std::size_t>(x.size()) != dim)
    throw InvalidInput(std::string(what) + ": dimension mismatch (" +
                       std::to_string(x.size()) + " vs " + std::to_string(dim) + ")");
}

inline IndexList iota_indices(std::size_t n) {
  IndexList idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

}  // namespace marginrec
