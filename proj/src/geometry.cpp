#include "cdand/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "cdand/errors.hpp"

namespace cdand {

namespace {

constexpr double kAreaTolerance = 1e-6;      // m^2, collinearity cutoff
constexpr double kStepTolerance = 1e-9;      // m, solver convergence
constexpr int kMaxIterations = 100;

struct Mat2 {
  double a = 0, b = 0, c = 0, d = 0;  // [[a b], [c d]]
};

bool solve2x2(const Mat2& m, Point2 rhs, Point2& out) {
  const double det = m.a * m.d - m.b * m.c;
  const double scale = std::max({std::abs(m.a), std::abs(m.b), std::abs(m.c), std::abs(m.d)});
  if (scale == 0.0 || std::abs(det) < 1e-14 * scale * scale) return false;
  out.x = (rhs.x * m.d - rhs.y * m.b) / det;
  out.y = (m.a * rhs.y - m.c * rhs.x) / det;
  return true;
}

double objective(std::span<const Point2> anchors, std::span<const double> ranges,
                 std::span<const double> weights, Point2 p) {
  double s = 0.0;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const double r = distance(p, anchors[i]) - ranges[i];
    s += weights[i] * r * r;
  }
  return s;
}

// Linearized trilateration: subtract the first range equation from the rest
// and solve the resulting linear system in p by weighted normal equations.
Point2 linear_init(std::span<const Point2> anchors, std::span<const double> ranges,
                   std::span<const double> weights) {
  const Point2 z0 = anchors[0];
  const double d0 = ranges[0];
  Mat2 ata;
  Point2 atb{0, 0};
  for (std::size_t i = 1; i < anchors.size(); ++i) {
    const Point2 zi = anchors[i];
    const Point2 a = (zi - z0) * 2.0;
    const double b = norm_sq(zi) - norm_sq(z0) - (ranges[i] * ranges[i] - d0 * d0);
    const double w = weights[i];
    ata.a += w * a.x * a.x;
    ata.b += w * a.x * a.y;
    ata.c += w * a.y * a.x;
    ata.d += w * a.y * a.y;
    atb.x += w * a.x * b;
    atb.y += w * a.y * b;
  }
  Point2 p;
  if (solve2x2(ata, atb, p)) return p;
  // Near-singular normal equations: fall back to the anchor centroid.
  Point2 c{0, 0};
  for (const Point2& z : anchors) c = c + z;
  return c * (1.0 / static_cast<double>(anchors.size()));
}

Point2 solve_range_ls(std::span<const Point2> anchors, std::span<const double> ranges,
                      std::span<const double> weights) {
  if (anchors.size() != ranges.size() || anchors.size() != weights.size())
    throw std::invalid_argument("multilaterate: anchors/ranges/weights length mismatch");
  if (anchors.size() < 3) throw std::invalid_argument("multilaterate: need at least 3 anchors");
  for (double d : ranges)
    if (!(d >= 0.0) || !std::isfinite(d))
      throw std::invalid_argument("multilaterate: ranges must be finite and nonnegative");
  for (const Point2& z : anchors)
    if (!is_finite(z)) throw std::invalid_argument("multilaterate: non-finite anchor");
  for (double w : weights)
    if (!(w >= 0.0)) throw std::invalid_argument("multilaterate: negative weight");

  if (max_triangle_area(anchors) < kAreaTolerance)
    throw DegenerateGeometry("multilaterate: anchors are collinear within tolerance");

  Point2 p = linear_init(anchors, ranges, weights);
  double cost = objective(anchors, ranges, weights, p);
  double damping = 1e-3;

  for (int iter = 0; iter < kMaxIterations; ++iter) {
    Mat2 jtj;
    Point2 jtr{0, 0};
    for (std::size_t i = 0; i < anchors.size(); ++i) {
      const Point2 diff = p - anchors[i];
      const double dist = norm(diff);
      if (dist < 1e-12) continue;  // residual gradient undefined at the anchor itself
      const Point2 row = diff * (1.0 / dist);
      const double r = dist - ranges[i];
      const double w = weights[i];
      jtj.a += w * row.x * row.x;
      jtj.b += w * row.x * row.y;
      jtj.c += w * row.y * row.x;
      jtj.d += w * row.y * row.y;
      jtr.x += w * row.x * r;
      jtr.y += w * row.y * r;
    }

    Mat2 damped = jtj;
    damped.a += damping * (1.0 + jtj.a);
    damped.d += damping * (1.0 + jtj.d);
    Point2 step;
    if (!solve2x2(damped, Point2{-jtr.x, -jtr.y}, step)) {
      damping *= 10.0;
      if (damping > 1e12) return p;
      continue;
    }
    if (norm(step) < kStepTolerance) return p;

    const Point2 candidate = p + step;
    const double cand_cost = objective(anchors, ranges, weights, candidate);
    if (cand_cost <= cost) {
      p = candidate;
      cost = cand_cost;
      damping = std::max(damping / 3.0, 1e-12);
    } else {
      damping *= 4.0;
      if (damping > 1e12) return p;  // steps pinned below machine resolution
    }
  }
  throw NoConvergence("multilaterate: iteration cap reached");
}

}  // namespace

double max_triangle_area(std::span<const Point2> anchors) {
  double best = 0.0;
  const std::size_t n = anchors.size();
  for (std::size_t i = 0; i + 2 < n; ++i)
    for (std::size_t j = i + 1; j + 1 < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const double area =
            0.5 * std::abs(cross(anchors[j] - anchors[i], anchors[k] - anchors[i]));
        best = std::max(best, area);
      }
  return best;
}

Point2 multilaterate(std::span<const Point2> anchors, std::span<const double> ranges) {
  std::vector<double> w(anchors.size(), 1.0);
  return solve_range_ls(anchors, ranges, w);
}

Point2 multilaterate_weighted(std::span<const Point2> anchors, std::span<const double> ranges,
                              std::span<const double> weights) {
  return solve_range_ls(anchors, ranges, weights);
}

double scalar_median(std::span<const double> values) {
  if (values.empty()) throw EmptySet("median of empty set");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + m, v.end());
  const double hi = v[m];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + m);
  return (lo + hi) / 2.0;
}

Point2 coordinate_median(std::span<const Point2> points) {
  if (points.empty()) throw EmptySet("coordinate_median of empty set");
  std::vector<double> xs(points.size()), ys(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    xs[i] = points[i].x;
    ys[i] = points[i].y;
  }
  return {scalar_median(xs), scalar_median(ys)};
}

double weighted_median_1d(std::span<const double> values, std::span<const double> weights) {
  if (values.empty()) throw EmptySet("weighted median of empty set");
  if (values.size() != weights.size())
    throw std::invalid_argument("weighted median: value/weight length mismatch");

  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("weighted median: negative weight");
    total += w;
  }
  if (total <= 0.0) throw AllZeroWeights("weighted median: all weights zero");

  const double half = total / 2.0;
  double cum = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    cum += weights[order[i]];
    if (cum > half) return values[order[i]];
    if (cum == half) {
      // Exact split: every point between this value and the next one with
      // positive weight minimizes the objective; take the midpoint.
      for (std::size_t j = i + 1; j < order.size(); ++j)
        if (weights[order[j]] > 0.0) return (values[order[i]] + values[order[j]]) / 2.0;
      return values[order[i]];
    }
  }
  return values[order.back()];  // unreachable for positive total
}

Point2 weighted_l1_median(std::span<const Point2> points, std::span<const double> weights) {
  if (points.empty()) throw EmptySet("weighted_l1_median of empty set");
  std::vector<double> xs(points.size()), ys(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    xs[i] = points[i].x;
    ys[i] = points[i].y;
  }
  return {weighted_median_1d(xs, weights), weighted_median_1d(ys, weights)};
}

Point2 weighted_l1_median(const WeightedPointSet& set) {
  return weighted_l1_median(set.points, set.weights);
}

}  // namespace cdand
