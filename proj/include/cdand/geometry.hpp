#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace cdand {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
  Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
  Point2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Point2&) const = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm_sq(Point2 a) { return dot(a, a); }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline bool is_finite(Point2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

struct WeightedPointSet {
  std::vector<Point2> points;
  std::vector<double> weights;
};

/// Squared-range-residual least squares: argmin_p sum_n (|p - z_n| - d_n)^2.
/// Damped Gauss-Newton started from the linearized trilateration solution.
/// Throws DegenerateGeometry for collinear anchor sets and NoConvergence if
/// the iteration cap is hit.
Point2 multilaterate(std::span<const Point2> anchors, std::span<const double> ranges);

/// Same objective with per-anchor nonnegative weights.
Point2 multilaterate_weighted(std::span<const Point2> anchors, std::span<const double> ranges,
                              std::span<const double> weights);

/// Per-axis median; even counts take the mean of the two middle order
/// statistics.
Point2 coordinate_median(std::span<const Point2> points);

/// Scalar median with the same even-count convention.
double scalar_median(std::span<const double> values);

/// argmin_m sum_l w_l |x_l - m|_1. Separable per axis; lower weighted median,
/// midpoint when the minimizing set is an interval.
Point2 weighted_l1_median(const WeightedPointSet& set);
Point2 weighted_l1_median(std::span<const Point2> points, std::span<const double> weights);

/// One axis of the weighted median (exposed for tests).
double weighted_median_1d(std::span<const double> values, std::span<const double> weights);

/// Largest triangle area over all anchor triples; zero iff collinear.
double max_triangle_area(std::span<const Point2> anchors);

}  // namespace cdand
