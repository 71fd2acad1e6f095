#pragma once

#include "marginrec/core.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace marginrec {

// Dense two-phase tableau simplex specialised to convex-hull programs over a
// fixed vertex set V (dim x n):
//
//   membership:  exists lambda >= 0, 1^T lambda = 1, V lambda = x
//   ray exit:    max alpha >= 0 such that x + alpha u = V lambda as above
//
// Pivoting uses Bland's rule (lowest-index entering column, lowest-key
// leaving row) so results are deterministic and cycling cannot occur.
// Artificial columns are never re-entered and are not stored.
//
// Instances hold a reusable workspace; share the vertex data, not the solver,
// between threads.
class HullLp {
 public:
  explicit HullLp(Matrix vertices, double feasibility_tol = 1e-8)
      : v_(std::move(vertices)), tol_(feasibility_tol) {
    if (v_.cols() == 0) throw InvalidInput("HullLp: empty vertex set");
  }

  std::size_t dim() const { return static_cast<std::size_t>(v_.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(v_.cols()); }
  const Matrix& vertices() const { return v_; }
  double tolerance() const { return tol_; }

  // Minimal L1 residual of the membership system (0 when x is in the hull).
  double residual(const Eigen::Ref<const Point>& x) {
    require_dim(x, dim(), "hull membership");
    if (is_vertex(x)) return 0.0;
    setup(x, nullptr);
    return phase_one();
  }

  bool contains(const Eigen::Ref<const Point>& x) {
    require_dim(x, dim(), "hull membership");
    if (is_vertex(x)) return true;
    setup(x, nullptr);
    return phase_one() <= tol_;
  }

  // Largest alpha >= 0 with x + alpha u in conv(V).
  double ray_exit(const Eigen::Ref<const Point>& x, const Eigen::Ref<const Point>& u) {
    return chord(x, u).first;
  }

  // Exit distances along +u and -u from a common feasible basis.
  std::pair<double, double> chord(const Eigen::Ref<const Point>& x,
                                  const Eigen::Ref<const Point>& u) {
    require_dim(x, dim(), "ray exit");
    require_dim(u, dim(), "ray exit");
    setup(x, &u);
    if (phase_one() > tol_)
      throw PreconditionError("ray exit: start point is outside the hull");
    remove_artificials();
    saved_ = t_;
    saved_basis_ = basis_;
    const int n = static_cast<int>(v_.cols());
    double forward = phase_two(n, n + 1);
    t_.swap(saved_);
    basis_.swap(saved_basis_);
    double backward = phase_two(n + 1, n);
    return {std::max(0.0, forward), std::max(0.0, backward)};
  }

  int last_pivot_count() const { return pivots_; }

 private:
  static constexpr double kPivotTol = 1e-10;
  static constexpr double kCostTol = 1e-10;

  double& at(int r, int c) { return t_[static_cast<std::size_t>(r) * stride_ + c]; }
  double at(int r, int c) const { return t_[static_cast<std::size_t>(r) * stride_ + c]; }

  bool is_vertex(const Eigen::Ref<const Point>& x) const {
    for (Eigen::Index j = 0; j < v_.cols(); ++j)
      if (v_.col(j) == x) return true;
    return false;
  }

  // Rows 0..dim-1: coordinate equations, row dim: sum of weights, row dim+1:
  // objective. Optional columns n (x + alpha u) and n+1 (x - alpha u).
  void setup(const Eigen::Ref<const Point>& x, const Eigen::Ref<const Point>* u) {
    const int m = static_cast<int>(v_.rows());
    const int n = static_cast<int>(v_.cols());
    rows_ = m + 1;
    cols_ = n + (u ? 2 : 0);
    stride_ = cols_ + 1;
    obj_ = rows_;
    t_.assign(static_cast<std::size_t>(rows_ + 1) * stride_, 0.0);
    for (int i = 0; i < m; ++i) {
      double* row = &t_[static_cast<std::size_t>(i) * stride_];
      for (int j = 0; j < n; ++j) row[j] = v_(i, j);
      if (u) {
        row[n] = -(*u)[i];
        row[n + 1] = (*u)[i];
      }
      row[cols_] = x[i];
    }
    {
      double* row = &t_[static_cast<std::size_t>(m) * stride_];
      for (int j = 0; j < n; ++j) row[j] = 1.0;
      row[cols_] = 1.0;
    }
    for (int i = 0; i < rows_; ++i) {
      double* row = &t_[static_cast<std::size_t>(i) * stride_];
      if (row[cols_] < 0.0)
        for (int j = 0; j <= cols_; ++j) row[j] = -row[j];
    }
    basis_.assign(static_cast<std::size_t>(rows_), 0);
    for (int i = 0; i < rows_; ++i) basis_[i] = -(i + 1);
    double* objrow = &t_[static_cast<std::size_t>(obj_) * stride_];
    for (int i = 0; i < rows_; ++i) {
      const double* row = &t_[static_cast<std::size_t>(i) * stride_];
      for (int j = 0; j <= cols_; ++j) objrow[j] -= row[j];
    }
    entering_limit_ = n;
    pivots_ = 0;
  }

  void pivot(int r, int c) {
    ++pivots_;
    double* prow = &t_[static_cast<std::size_t>(r) * stride_];
    const double inv = 1.0 / prow[c];
    for (int j = 0; j <= cols_; ++j) prow[j] *= inv;
    prow[c] = 1.0;
    for (int i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      double* row = &t_[static_cast<std::size_t>(i) * stride_];
      const double f = row[c];
      if (f == 0.0) continue;
      for (int j = 0; j <= cols_; ++j) row[j] -= f * prow[j];
      row[c] = 0.0;
    }
    basis_[r] = c;
  }

  // Fixed variable order for Bland's rule: artificials first, then columns.
  int order_key(int basic) const { return basic < 0 ? -basic - 1 - rows_ : basic; }

  int leaving_row(int c, bool zero_level_artificials) const {
    int best = -1;
    double best_ratio = kInfinity;
    for (int i = 0; i < rows_; ++i) {
      const double a = at(i, c);
      double ratio;
      if (zero_level_artificials && basis_[i] < 0) {
        // An artificial stuck at zero blocks any move that would disturb it.
        if (std::abs(a) <= kPivotTol) continue;
        ratio = 0.0;
      } else {
        if (a <= kPivotTol) continue;
        ratio = std::max(0.0, at(i, cols_)) / a;
      }
      if (best < 0 || ratio < best_ratio - 1e-13) {
        best = i;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + 1e-13 &&
                 order_key(basis_[i]) < order_key(basis_[best])) {
        best = i;
        best_ratio = std::min(best_ratio, ratio);
      }
    }
    return best;
  }

  // Bland: lowest-index improving column.
  int entering_column(const double* objrow, int limit, int excluded) const {
    for (int j = 0; j < limit; ++j)
      if (j != excluded && objrow[j] < -kCostTol) return j;
    return -1;
  }

  int iteration_cap() const { return 50 * (rows_ + cols_) + 100; }

  // Returns the minimal sum of artificial variables.
  double phase_one() {
    const int cap = iteration_cap();
    for (int it = 0; it < cap; ++it) {
      const double* objrow = &t_[static_cast<std::size_t>(obj_) * stride_];
      int enter = entering_column(objrow, entering_limit_, -1);
      if (enter < 0) return std::max(0.0, -at(obj_, cols_));
      int leave = leaving_row(enter, false);
      if (leave < 0) return std::max(0.0, -at(obj_, cols_));  // cannot happen: bounded below
      pivot(leave, enter);
    }
    throw ConvergenceError("hull LP: phase one iteration cap reached", -at(obj_, cols_));
  }

  void remove_artificials() {
    const int n = static_cast<int>(v_.cols());
    for (int i = 0; i < rows_; ++i) {
      if (basis_[i] >= 0) continue;
      int best = -1;
      double best_abs = kPivotTol;
      for (int j = 0; j < n; ++j) {
        double a = std::abs(at(i, j));
        if (a > best_abs) {
          best_abs = a;
          best = j;
        }
      }
      if (best >= 0) pivot(i, best);
    }
  }

  // Maximise the alpha column `target`; column `excluded` never enters.
  double phase_two(int target, int excluded) {
    double* objrow = &t_[static_cast<std::size_t>(obj_) * stride_];
    std::fill(objrow, objrow + stride_, 0.0);
    // reduced costs equal raw costs: every basic variable has zero cost
    objrow[target] = -1.0;
    for (int i = 0; i < rows_; ++i)
      if (basis_[i] == target) throw Error("hull LP: objective column already basic");
    const int cap = iteration_cap();
    for (int it = 0; it < cap; ++it) {
      int enter = entering_column(objrow, cols_, excluded);
      if (enter < 0) return at(obj_, cols_);
      int leave = leaving_row(enter, true);
      if (leave < 0) throw Error("hull LP: unbounded ray (direction not in a bounded hull)");
      pivot(leave, enter);
      objrow = &t_[static_cast<std::size_t>(obj_) * stride_];
    }
    throw ConvergenceError("hull LP: phase two iteration cap reached", at(obj_, cols_));
  }

  Matrix v_;
  double tol_;
  std::vector<double> t_, saved_;
  std::vector<int> basis_, saved_basis_;
  int rows_ = 0, cols_ = 0, stride_ = 0, obj_ = 0, entering_limit_ = 0;
  int pivots_ = 0;
};

}  // namespace marginrec
