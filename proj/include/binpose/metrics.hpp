#pragma once

#include <span>
#include <vector>

#include "binpose/types.hpp"

namespace binpose {

struct PoseError {
  double te_m = 0.0;    // Euclidean translation error, meters
  double re_deg = 0.0;  // angular rotation error, degrees in [0, 180]
};

struct EvalReport {
  std::size_t count = 0;
  double mean_te_cm = 0.0;
  double mean_re_deg = 0.0;
  bool symmetry_aware = false;
  std::vector<PoseError> samples;
};

double translation_error(const Vec3& t_hat, const Vec3& t);

// arccos((Tr(R_hat R^-1) - 1) / 2) in degrees; the argument is clamped to
// [-1, 1] so round-off near identity cannot produce NaN.
double rotation_error(const RotationMatrix& r_hat, const RotationMatrix& r);

// min over the two z-flips of the ground truth; a cuboid bin is
// indistinguishable from itself rotated pi about its vertical axis.
double rotation_error_z_symmetric(const RotationMatrix& r_hat,
                                  const RotationMatrix& r);

EvalReport evaluate_set(std::span<const Pose> predictions,
                        std::span<const Pose> ground_truths,
                        bool symmetry_aware);

}  // namespace binpose
