#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>
#include <string>
#include <vector>

#include "binpose/errors.hpp"

namespace binpose {

using Vec3 = Eigen::Vector3d;

// Column-major 3x3; columns are the x/y/z axes of the rotated frame.
using RotationMatrix = Eigen::Matrix3d;

inline bool is_rotation(const RotationMatrix& r, double tol) {
  const double ortho = (r.transpose() * r - RotationMatrix::Identity())
                           .cwiseAbs()
                           .maxCoeff();
  return ortho <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

// Rotation by pi about the local z axis; right-multiplying a pose rotation
// with this gives the indistinguishable flipped pose of a cuboid.
inline RotationMatrix z_flip() {
  RotationMatrix m = RotationMatrix::Identity();
  m(0, 0) = -1.0;
  m(1, 1) = -1.0;
  return m;
}

struct Pose {
  RotationMatrix rotation = RotationMatrix::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  // Composition: (*this) after other, i.e. apply(other.apply(p)).
  Pose compose(const Pose& other) const {
    return Pose{rotation * other.rotation,
                rotation * other.translation + translation};
  }

  Pose inverse() const {
    return Pose{rotation.transpose(), -(rotation.transpose() * translation)};
  }
};

// Endpoints are unordered: (a, b) and (b, a) describe the same segment.
struct LineSegment3 {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  double confidence = 1.0;

  Vec3 direction() const { return b - a; }
  double length() const { return (b - a).norm(); }
};

inline LineSegment3 transform_segment(const Pose& t, const LineSegment3& s) {
  return LineSegment3{t.apply(s.a), t.apply(s.b), s.confidence};
}

// Cuboid bin, outer dimensions in meters. The bin frame has its origin at
// the bottom-face center, z through the open top, x along the longer side,
// so x spans `length` and y spans `width`.
struct BinModel {
  double width = 0.0;
  double length = 0.0;
  double height = 0.0;

  void validate() const {
    if (!(width > 0.0) || !(length > 0.0) || !(height > 0.0))
      throw ConfigInvalid("bin dimensions must be positive");
    if (length < width)
      throw ConfigInvalid("bin length must be >= width");
  }
};

// The eight segment endpoints centered by their centroid; rows of `centered`
// sum to zero per column by construction.
struct EndpointMatrix {
  Eigen::Matrix<double, 8, 3> centered;
  Vec3 centroid;
};

}  // namespace binpose
