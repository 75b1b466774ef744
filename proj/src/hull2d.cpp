#include "binpose/hull2d.hpp"

#include <algorithm>
#include <limits>

namespace binpose {

namespace {
double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}
}  // namespace

std::vector<Vec2> convex_hull(std::vector<Vec2> points) {
  std::sort(points.begin(), points.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  points.erase(std::unique(points.begin(), points.end(),
                           [](const Vec2& a, const Vec2& b) {
                             return a.x() == b.x() && a.y() == b.y();
                           }),
               points.end());
  const std::size_t n = points.size();
  if (n < 3) return points;

  std::vector<Vec2> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower chain
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], points[i]) <= 0.0) --k;
    hull[k++] = points[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {  // upper chain
    while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i]) <= 0.0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

double polygon_area(const std::vector<Vec2>& polygon) {
  double twice = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % n];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return std::abs(twice) / 2.0;
}

RectFit min_area_rect(const std::vector<Vec2>& hull) {
  RectFit best;
  best.area = std::numeric_limits<double>::infinity();

  const std::size_t n = hull.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 edge = hull[(i + 1) % n] - hull[i];
    const double len = edge.norm();
    if (len < 1e-15) continue;
    const Vec2 dir = edge / len;
    const Vec2 perp(-dir.y(), dir.x());

    double d_min = std::numeric_limits<double>::infinity(), d_max = -d_min;
    double p_min = d_min, p_max = -d_min;
    for (const Vec2& p : hull) {
      const double d = dir.dot(p);
      const double q = perp.dot(p);
      d_min = std::min(d_min, d);
      d_max = std::max(d_max, d);
      p_min = std::min(p_min, q);
      p_max = std::max(p_max, q);
    }
    const double area = (d_max - d_min) * (p_max - p_min);
    if (area < best.area) {
      best.area = area;
      best.corners[0] = d_min * dir + p_min * perp;
      best.corners[1] = d_max * dir + p_min * perp;
      best.corners[2] = d_max * dir + p_max * perp;
      best.corners[3] = d_min * dir + p_max * perp;
    }
  }
  return best;
}

}  // namespace binpose
