#pragma once

#include "marginrec/core.hpp"
#include "marginrec/geometry/hull.hpp"
#include "marginrec/geometry/hull_lp.hpp"
#include "marginrec/geometry/mvee.hpp"
#include "marginrec/sampling/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace marginrec {

// Zero fields mean "derive from the hull's rank r":
//   desk rule:   steps = max(200, 25 r^2)
//   paper rule:  steps = ceil(r^4 ln(r / eps))
//   samples = 50 (r+1)^2, eps = 1 / (8 (r+1))
struct WalkConfig {
  enum class StepRule { desk, paper };
  std::size_t steps = 0;
  std::size_t samples = 0;
  double eps = 0.0;
  StepRule rule = StepRule::desk;

  void validate() const {
    if (eps != 0.0 && !(eps > 0.0 && eps < 1.0))
      throw InvalidInput("WalkConfig: eps must be in (0,1)");
  }

  WalkConfig resolved(std::size_t rank) const {
    validate();
    WalkConfig c = *this;
    const double r = static_cast<double>(std::max<std::size_t>(rank, 1));
    if (c.eps == 0.0) c.eps = 1.0 / (8.0 * (r + 1.0));
    if (c.steps == 0) {
      if (rule == StepRule::paper)
        c.steps = static_cast<std::size_t>(
            std::max(1.0, std::ceil(r * r * r * r * std::log(std::max(r / c.eps, 1.0 + 1e-12)))));
      else
        c.steps = static_cast<std::size_t>(std::max(200.0, 25.0 * r * r));
    }
    if (c.samples == 0) c.samples = static_cast<std::size_t>(50.0 * (r + 1.0) * (r + 1.0));
    return c;
  }
};

namespace detail {

// Hit-and-run over a full-dimensional polytope given by its vertex columns.
class ChordWalker {
 public:
  explicit ChordWalker(Matrix vertices, double tol = 1e-8) : lp_(std::move(vertices), tol) {}

  void step(Point& x, RandomSource& rng) {
    Point u = rng.unit_vector(x.size());
    auto [forward, backward] = lp_.chord(x, u);
    double a = -backward + (forward + backward) * rng.uniform01();
    x += a * u;
  }

  std::size_t dim() const { return lp_.dim(); }

 private:
  HullLp lp_;
};

}  // namespace detail

using WalkObserver = std::function<void(const Point&)>;

// t hit-and-run steps from `start` within conv(V), in V's affine span.
// The observer, if set, sees every intermediate position (ambient coords).
inline Point hit_and_run_sample(const PointSet& v, const Eigen::Ref<const Point>& start,
                                std::size_t t, RandomSource& rng,
                                const WalkObserver& observer = {}) {
  if (v.empty()) throw InvalidInput("hit_and_run_sample: empty vertex set");
  require_dim(start, v.dim(), "hit_and_run_sample");
  if (t < 1) throw PreconditionError("hit_and_run_sample: at least one step required");
  if (!hull_contains(v, start))
    throw PreconditionError("hit_and_run_sample: start point is outside the hull");
  AffineFrame frame = affine_frame(v);
  if (frame.rank() == 0) {
    Point p = start;
    for (std::size_t i = 0; i < t && observer; ++i) observer(p);
    return p;
  }
  detail::ChordWalker walker(frame.to_local(v.matrix()));
  Point y = frame.basis.transpose() * (start - frame.origin);
  for (std::size_t i = 0; i < t; ++i) {
    walker.step(y, rng);
    if (observer) observer(frame.to_ambient(y));
  }
  return frame.to_ambient(y);
}

// Mean of N walk endpoints, each chain started at the MVEE center of V after
// mapping V to near-isotropic position; the mean is mapped back.
inline Point approx_centroid(const PointSet& v, const WalkConfig& cfg, RandomSource& rng) {
  if (v.empty()) throw InvalidInput("approx_centroid: empty vertex set");
  cfg.validate();
  if (v.size() == 1) return v.point(0);
  PointSet hull = extreme_points(v);
  if (hull.size() == 1) return hull.point(0);
  IsotropicResult iso = isotropic_transform(hull);
  const std::size_t r = iso.map.rank;
  if (r == 0) return iso.map.inv_origin;
  const WalkConfig c = cfg.resolved(r);
  detail::ChordWalker walker(iso.image.matrix());
  Point sum = Point::Zero(static_cast<Eigen::Index>(r));
  for (std::size_t s = 0; s < c.samples; ++s) {
    Point y = Point::Zero(static_cast<Eigen::Index>(r));
    for (std::size_t i = 0; i < c.steps; ++i) walker.step(y, rng);
    sum += y;
  }
  sum /= static_cast<double>(c.samples);
  return iso.map.invert(sum);
}

// min(size, |X|) distinct entries of X, uniformly at random (partial
// Fisher-Yates); the whole list, shuffled, when size >= |X|.
inline IndexList sample_without_replacement(const IndexList& x, std::size_t size,
                                            RandomSource& rng) {
  IndexList pool = x;
  const std::size_t n = pool.size();
  const std::size_t take = std::min(size, n);
  for (std::size_t i = 0; i < take; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(take);
  return pool;
}

}  // namespace marginrec
