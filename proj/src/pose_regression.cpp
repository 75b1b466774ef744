#include "binpose/pose_regression.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace binpose {

EndpointMatrix center_endpoints(std::span<const LineSegment3> segments) {
  if (segments.size() != 4)
    throw WrongSegmentCount("expected 4 segments, got " +
                            std::to_string(segments.size()));

  Eigen::Matrix<double, 8, 3> pts;
  for (int i = 0; i < 4; ++i) {
    pts.row(2 * i) = segments[i].a.transpose();
    pts.row(2 * i + 1) = segments[i].b.transpose();
  }
  if (!pts.allFinite())
    throw WrongSegmentCount("segment endpoints must be finite");

  EndpointMatrix out;
  out.centroid = pts.colwise().mean().transpose();
  out.centered = pts.rowwise() - out.centroid.transpose();
  return out;
}

Vec3 fit_plane_normal(
    const Eigen::Matrix<double, Eigen::Dynamic, 3>& centered) {
  Eigen::JacobiSVD<Eigen::Matrix<double, Eigen::Dynamic, 3>> svd(
      centered, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(1) < 1e-12 * sv(0))
    throw DegenerateGeometry("points are collinear or coincident");

  Vec3 n = svd.matrixV().col(2);
  if (std::abs(n.z()) < 1e-9)
    throw AmbiguousOrientation("plane normal lies in the horizontal plane");
  if (n.z() < 0.0) n = -n;
  return n;
}

Vec3 fit_oriented_normal(const EndpointMatrix& endpoints) {
  return fit_plane_normal(endpoints.centered);
}

Vec3 fuse_directions(const Vec3& d1, const Vec3& d2) {
  if (d1.norm() < 1e-12 || d2.norm() < 1e-12)
    throw ZeroDirection("direction vectors must be nonzero");
  return d1.dot(d2) >= 0.0 ? Vec3{(d1 + d2) / 2.0} : Vec3{(d1 - d2) / 2.0};
}

RotationMatrix build_rotation(const Vec3& normal, const Vec3& direction) {
  if (normal.norm() < 1e-12 || direction.norm() < 1e-12)
    throw ZeroDirection("normal and direction must be nonzero");

  const Vec3 r_z = normal.normalized();
  const Vec3 in_plane = direction - r_z.dot(direction) * r_z;
  if (in_plane.norm() < 1e-9 * direction.norm())
    throw ParallelVectors("direction is parallel to the plane normal");

  const Vec3 r_x = in_plane.normalized();
  const Vec3 r_y = r_z.cross(r_x);

  RotationMatrix r;
  r.col(0) = r_x;
  r.col(1) = r_y;
  r.col(2) = r_z;
  return r;
}

std::vector<Vec3> cluster_to_four(std::vector<Vec3> points, bool weighted) {
  if (points.size() < 4)
    throw TooFewPoints("need at least 4 points, got " +
                       std::to_string(points.size()));

  std::vector<double> sizes(points.size(), 1.0);
  while (points.size() > 4) {
    std::size_t best_i = 0, best_j = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
      for (std::size_t j = i + 1; j < points.size(); ++j) {
        const double d = (points[i] - points[j]).squaredNorm();
        if (d < best) {
          best = d;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (weighted) {
      const double total = sizes[best_i] + sizes[best_j];
      points[best_i] =
          (sizes[best_i] * points[best_i] + sizes[best_j] * points[best_j]) /
          total;
      sizes[best_i] = total;
    } else {
      points[best_i] = (points[best_i] + points[best_j]) / 2.0;
    }
    points.erase(points.begin() + static_cast<std::ptrdiff_t>(best_j));
    sizes.erase(sizes.begin() + static_cast<std::ptrdiff_t>(best_j));
  }
  return points;
}

Vec3 compute_translation(std::span<const Vec3> centers, const Vec3& r_z,
                         const BinModel& bin) {
  Vec3 mean = Vec3::Zero();
  for (const Vec3& c : centers) mean += c;
  mean /= static_cast<double>(centers.size());
  return mean - bin.height * r_z;
}

Pose estimate_pose(std::span<const LineSegment3> segments, const BinModel& bin,
                   const EstimateOptions& options) {
  if (segments.size() < 4)
    throw WrongSegmentCount("need at least 4 segments, got " +
                            std::to_string(segments.size()));

  // Top 4 by confidence; stable sort keeps input order on ties, and the
  // chosen four are restored to input order afterwards.
  std::vector<std::size_t> order(segments.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t lhs, std::size_t rhs) {
                     return segments[lhs].confidence > segments[rhs].confidence;
                   });
  order.resize(4);
  std::sort(order.begin(), order.end());

  std::vector<LineSegment3> selected;
  selected.reserve(4);
  for (std::size_t idx : order) selected.push_back(segments[idx]);

  const EndpointMatrix endpoints = center_endpoints(selected);
  const Vec3 normal = fit_oriented_normal(endpoints);

  std::vector<std::size_t> by_length{0, 1, 2, 3};
  std::stable_sort(by_length.begin(), by_length.end(),
                   [&](std::size_t lhs, std::size_t rhs) {
                     return selected[lhs].length() > selected[rhs].length();
                   });
  std::size_t first = by_length[0], second = by_length[1];
  if (first > second) std::swap(first, second);

  const Vec3 fused = fuse_directions(selected[first].direction(),
                                     selected[second].direction());
  const RotationMatrix rotation = build_rotation(normal, fused);

  std::vector<Vec3> pts;
  pts.reserve(8);
  for (const LineSegment3& s : selected) {
    pts.push_back(s.a);
    pts.push_back(s.b);
  }
  const std::vector<Vec3> centers =
      cluster_to_four(std::move(pts), options.weighted_merge);

  return Pose{rotation, compute_translation(centers, rotation.col(2), bin)};
}

}  // namespace binpose
