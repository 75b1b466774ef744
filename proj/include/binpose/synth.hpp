#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "binpose/cloud.hpp"
#include "binpose/rng.hpp"
#include "binpose/types.hpp"

namespace binpose {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct IntRange {
  int lo = 0;
  int hi = 0;
};

// Synthetic scene generator: open-top cuboid bins resting on a ground plane,
// scanned by a tilted pinhole depth camera. The world frame is z-up with the
// ground at z = 0; rendered points are expressed in this frame.
struct SceneConfig {
  Range bin_width{0.25, 0.45};   // meters; y extent of the bin
  Range bin_length{0.5, 0.8};    // meters; x extent, always >= width
  Range bin_height{0.15, 0.4};   // meters
  Range bin_tilt_deg{0.0, 10.0};
  Range bin_center_xy{-0.15, 0.15};
  double wall_thickness = 0.02;

  Range camera_height{1.2, 1.8};  // meters above the ground
  Range camera_tilt_deg{0.0, 25.0};

  int image_width = 160;
  int image_height = 120;
  double focal_px = 160.0;

  double noise_sigma = 0.001;    // meters, along the ray
  double dropout_prob = 0.01;    // per-pixel invalidation probability
  IntRange distractor_count{0, 2};
  Range distractor_size{0.03, 0.12};  // per-dimension, meters

  int samples_per_scene = 5;
  double train_fraction = 0.7;
  double val_fraction = 0.15;

  void validate() const;
};

// Pinhole camera; orientation columns are the camera x (right), y (down)
// and z (view direction) axes in world coordinates.
struct Camera {
  Vec3 position = Vec3::Zero();
  RotationMatrix orientation = RotationMatrix::Identity();
  double focal_px = 160.0;
  int width = 160;
  int height = 120;
};

// Axis-aligned box [lo, hi] in its own frame, placed by (rotation, origin).
struct ObbPart {
  RotationMatrix rotation = RotationMatrix::Identity();
  Vec3 origin = Vec3::Zero();
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
};

struct SceneGeometry {
  std::vector<ObbPart> parts;  // bin walls + bottom, then distractors
  bool has_ground = true;
};

struct SceneDraw {
  BinModel bin;
  Pose bin_pose;
  Camera camera;
  SceneGeometry geometry;
};

struct ScanSample {
  StructuredPointCloud cloud;
  Pose gt_pose;
  std::vector<LineSegment3> gt_segments;  // 4 outer top-rim edges, confidence 1
  BinModel bin;
  std::string scene_id;
  std::string sample_id;
};

// The four outer top-rim edges implied by (bin, pose). The two long edges
// come first and both point along the bin +x axis, the two short edges
// follow pointing along +y; shared corners are exact duplicates.
std::vector<LineSegment3> gt_top_segments(const BinModel& bin,
                                          const Pose& pose);

// Five wall/bottom boxes of the open-top bin in the bin frame, posed.
std::vector<ObbPart> bin_parts(const BinModel& bin, const Pose& pose,
                               double wall_thickness);

BinModel draw_bin(const SceneConfig& config, Rng& rng);

// Draws pose, camera and distractors for a given bin. RNG consumption order
// is fixed; see the implementation.
SceneDraw draw_sample_geometry(const SceneConfig& config, const BinModel& bin,
                               Rng& rng);

// Per-pixel ray casting against ground, bin and distractors; nearest hit
// wins. Gaussian noise is applied along the ray, dropout invalidates pixels,
// and every stored coordinate is quantized to binary32 precision. Each pixel
// draws from its own derived stream, so the parallel and serial variants are
// bit-identical.
StructuredPointCloud render_scan(const SceneGeometry& geometry,
                                 const Camera& camera,
                                 const SceneConfig& config, std::uint64_t seed);
StructuredPointCloud render_scan_serial(const SceneGeometry& geometry,
                                        const Camera& camera,
                                        const SceneConfig& config,
                                        std::uint64_t seed);

// One self-contained sample: bin, pose, camera, rendered scan and ground
// truth. Deterministic per (config, seed).
ScanSample sample_scene(const SceneConfig& config, std::uint64_t seed);

}  // namespace binpose
