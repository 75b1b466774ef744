#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "binpose/cloud.hpp"
#include "binpose/synth.hpp"
#include "binpose/types.hpp"

namespace binpose {

// Pluggable 3D line segment detectors. All detectors produce the same
// representation (LineSegment3 lists), so the pose regression consumes any
// of them unchanged; an externally trained model can interoperate through
// the prediction file format.

struct OracleNoiseConfig {
  double sigma = 0.0;         // isotropic endpoint noise, meters
  int drop_count = 0;         // ground-truth segments removed at random
  int spurious_count = 0;     // random segments injected
  double spurious_conf_lo = 0.05;
  double spurious_conf_hi = 0.5;
  // True segments get confidence max(0, 1 - sigma * confidence_sigma_rate).
  double confidence_sigma_rate = 10.0;

  void validate() const;
};

// Perturbs the ground-truth rim segments: Gaussian endpoint noise, optional
// drops, optional spurious injections. Deterministic per (sample, cfg, seed).
std::vector<LineSegment3> oracle_detect(const ScanSample& sample,
                                        const OracleNoiseConfig& cfg,
                                        std::uint64_t seed);

struct RimDetectorConfig {
  int ransac_iterations = 256;
  double inlier_threshold = 0.005;  // meters, point-to-plane
  int min_inliers = 100;
  double ground_margin = 0.03;      // meters above the ground histogram mode
  double height_hist_bin = 0.02;    // meters
  double max_plane_tilt_deg = 45.0; // rejects wall-like candidate planes
  double min_hull_area = 1e-4;      // square meters
  std::string rect_method = "min_area_rect";  // only implemented method

  void validate() const;
};

// Analytical rim detector: RANSAC selects the highest sufficiently-populated
// near-horizontal plane above the ground, the plane inliers are projected to
// 2D, and the minimum-area rectangle of their convex hull is back-projected
// as four rim segments. Confidence is the plane's inlier ratio among the
// elevated points.
std::vector<LineSegment3> plane_rim_detect(const StructuredPointCloud& cloud,
                                           const RimDetectorConfig& cfg,
                                           std::uint64_t seed);

}  // namespace binpose
