#pragma once

#include <span>
#include <vector>

#include "binpose/types.hpp"

namespace binpose {

// Geometric regression from four detected rim segments to a 6DoF bin pose:
// plane fit for the up axis, fused long-edge direction for the in-plane
// axis, endpoint clustering plus the bin height for the translation.

// Stacks the 8 endpoints of exactly 4 segments (a then b, in input order)
// and centers them by their centroid.
EndpointMatrix center_endpoints(std::span<const LineSegment3> segments);

// Unit normal of the least-squares plane through arbitrary centered points,
// flipped so its z component is nonnegative.
Vec3 fit_plane_normal(const Eigen::Matrix<double, Eigen::Dynamic, 3>& centered);

Vec3 fit_oriented_normal(const EndpointMatrix& endpoints);

// Mean of the two directions, with d2 flipped first when they oppose.
// The result is not normalized.
Vec3 fuse_directions(const Vec3& d1, const Vec3& d2);

// Gram-Schmidt: r_z from the normal, r_x from the direction projected into
// the plane, r_y completing the right-handed frame.
RotationMatrix build_rotation(const Vec3& normal, const Vec3& direction);

// Greedy agglomeration: repeatedly replaces the closest pair by its midpoint
// (kept at the smaller index) until four points remain. Ties resolve to the
// lowest (i, j) in the current ordering. With `weighted`, merged points are
// size-weighted means instead of plain midpoints.
std::vector<Vec3> cluster_to_four(std::vector<Vec3> points,
                                  bool weighted = false);

Vec3 compute_translation(std::span<const Vec3> centers, const Vec3& r_z,
                         const BinModel& bin);

struct EstimateOptions {
  bool weighted_merge = false;
};

// Full regression: top-4 segments by confidence, plane normal, fused
// direction of the two longest, clustered endpoint centers, translation.
Pose estimate_pose(std::span<const LineSegment3> segments, const BinModel& bin,
                   const EstimateOptions& options = {});

}  // namespace binpose
