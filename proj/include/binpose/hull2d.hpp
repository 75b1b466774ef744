#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

namespace binpose {

using Vec2 = Eigen::Vector2d;

// Convex hull in counter-clockwise order, collinear points dropped
// (Andrew monotone chain).
std::vector<Vec2> convex_hull(std::vector<Vec2> points);

double polygon_area(const std::vector<Vec2>& polygon);

struct RectFit {
  std::array<Vec2, 4> corners;  // in cycle order: consecutive pairs are edges
  double area = 0.0;
};

// Minimum-area enclosing rectangle of a convex hull. One side of the optimum
// is collinear with a hull edge, so every edge direction is scanned and the
// tightest frame kept (first edge wins ties).
RectFit min_area_rect(const std::vector<Vec2>& hull);

}  // namespace binpose
