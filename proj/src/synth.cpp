#include "binpose/synth.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <limits>

namespace binpose {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kDegToRad = kPi / 180.0;

void check_range(const Range& r, const char* name, bool positive = false) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi))
    throw ConfigInvalid(std::string(name) + " range is empty or non-finite");
  if (positive && !(r.lo > 0.0))
    throw ConfigInvalid(std::string(name) + " range must be positive");
}

bool ray_box(const ObbPart& part, const Vec3& origin, const Vec3& dir,
             double& t_hit) {
  const Vec3 o = part.rotation.transpose() * (origin - part.origin);
  const Vec3 d = part.rotation.transpose() * dir;
  double tmin = 1e-9;
  double tmax = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    if (std::abs(d[k]) < 1e-15) {
      if (o[k] < part.lo[k] || o[k] > part.hi[k]) return false;
      continue;
    }
    double t1 = (part.lo[k] - o[k]) / d[k];
    double t2 = (part.hi[k] - o[k]) / d[k];
    if (t1 > t2) std::swap(t1, t2);
    tmin = std::max(tmin, t1);
    tmax = std::min(tmax, t2);
    if (tmin > tmax) return false;
  }
  t_hit = tmin;
  return true;
}

StructuredPointCloud render_impl(const SceneGeometry& geometry,
                                 const Camera& camera,
                                 const SceneConfig& config, std::uint64_t seed,
                                 bool parallel) {
  StructuredPointCloud cloud =
      StructuredPointCloud::make(camera.width, camera.height);
  const double cx = camera.width / 2.0;
  const double cy = camera.height / 2.0;

  const auto shade_row = [&](int row) {
    for (int col = 0; col < camera.width; ++col) {
      const std::uint64_t pixel =
          static_cast<std::uint64_t>(row) *
              static_cast<std::uint64_t>(camera.width) +
          static_cast<std::uint64_t>(col);
      Rng rng(derive_seed(seed, pixel));
      if (rng.bernoulli(config.dropout_prob)) continue;

      const Vec3 dir_cam =
          Vec3((col + 0.5 - cx) / camera.focal_px,
               (row + 0.5 - cy) / camera.focal_px, 1.0)
              .normalized();
      const Vec3 dir = camera.orientation * dir_cam;
      const Vec3& origin = camera.position;

      double t_best = std::numeric_limits<double>::infinity();
      if (geometry.has_ground && std::abs(dir.z()) > 1e-15) {
        const double t = -origin.z() / dir.z();
        if (t > 1e-9) t_best = t;
      }
      for (const ObbPart& part : geometry.parts) {
        double t = 0.0;
        if (ray_box(part, origin, dir, t) && t < t_best) t_best = t;
      }
      const double eps = config.noise_sigma * rng.normal();
      if (!std::isfinite(t_best)) continue;

      cloud.set_point(row, col, origin + (t_best + eps) * dir);
    }
  };

  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int row = 0; row < camera.height; ++row) shade_row(row);
  } else {
    for (int row = 0; row < camera.height; ++row) shade_row(row);
  }
  return cloud;
}

}  // namespace

void SceneConfig::validate() const {
  check_range(bin_width, "bin_width", true);
  check_range(bin_length, "bin_length", true);
  check_range(bin_height, "bin_height", true);
  check_range(bin_tilt_deg, "bin_tilt_deg");
  check_range(bin_center_xy, "bin_center_xy");
  check_range(camera_height, "camera_height", true);
  check_range(camera_tilt_deg, "camera_tilt_deg");
  check_range(distractor_size, "distractor_size", true);

  if (bin_width.hi > bin_length.lo)
    throw ConfigInvalid("bin_width.hi must not exceed bin_length.lo");
  if (!(wall_thickness > 0.0) || wall_thickness >= bin_width.lo / 2.0)
    throw ConfigInvalid("wall_thickness must be in (0, bin_width.lo / 2)");
  if (bin_tilt_deg.lo < 0.0 || camera_tilt_deg.lo < 0.0 ||
      bin_tilt_deg.hi + camera_tilt_deg.hi > 75.0)
    throw ConfigInvalid(
        "tilt ranges must keep the rim normal in the camera's upper "
        "hemisphere (bin_tilt.hi + camera_tilt.hi <= 75 deg)");
  if (camera_height.lo < bin_height.hi + 0.3)
    throw ConfigInvalid("camera_height.lo must exceed bin_height.hi + 0.3");
  if (image_width < 8 || image_height < 8)
    throw ConfigInvalid("image dimensions must be at least 8x8");
  if (!(focal_px > 0.0)) throw ConfigInvalid("focal_px must be positive");
  if (noise_sigma < 0.0) throw ConfigInvalid("noise_sigma must be >= 0");
  if (dropout_prob < 0.0 || dropout_prob > 1.0)
    throw ConfigInvalid("dropout_prob must be in [0, 1]");
  if (distractor_count.lo < 0 || distractor_count.lo > distractor_count.hi)
    throw ConfigInvalid("distractor_count range invalid");
  if (samples_per_scene < 1)
    throw ConfigInvalid("samples_per_scene must be >= 1");
  if (train_fraction < 0.0 || val_fraction < 0.0 ||
      train_fraction + val_fraction > 1.0)
    throw ConfigInvalid("split fractions must be nonnegative and sum to <= 1");
}

std::vector<LineSegment3> gt_top_segments(const BinModel& bin,
                                          const Pose& pose) {
  bin.validate();
  const double hx = bin.length / 2.0;
  const double hy = bin.width / 2.0;
  const double z = bin.height;

  // Shared corners are computed once so duplicates are exact.
  const Vec3 c_pp = pose.apply(Vec3(hx, hy, z));
  const Vec3 c_np = pose.apply(Vec3(-hx, hy, z));
  const Vec3 c_nn = pose.apply(Vec3(-hx, -hy, z));
  const Vec3 c_pn = pose.apply(Vec3(hx, -hy, z));

  return {
      LineSegment3{c_np, c_pp, 1.0},  // long edge at +y, points along +x
      LineSegment3{c_nn, c_pn, 1.0},  // long edge at -y
      LineSegment3{c_pn, c_pp, 1.0},  // short edge at +x, points along +y
      LineSegment3{c_nn, c_np, 1.0},  // short edge at -x
  };
}

std::vector<ObbPart> bin_parts(const BinModel& bin, const Pose& pose,
                               double wall_thickness) {
  const double hx = bin.length / 2.0;
  const double hy = bin.width / 2.0;
  const double h = bin.height;
  const double t = wall_thickness;

  std::vector<ObbPart> parts(5);
  for (ObbPart& p : parts) {
    p.rotation = pose.rotation;
    p.origin = pose.translation;
  }
  parts[0].lo = Vec3(-hx, -hy, 0);  // bottom slab
  parts[0].hi = Vec3(hx, hy, t);
  parts[1].lo = Vec3(hx - t, -hy, 0);  // wall +x
  parts[1].hi = Vec3(hx, hy, h);
  parts[2].lo = Vec3(-hx, -hy, 0);  // wall -x
  parts[2].hi = Vec3(-hx + t, hy, h);
  parts[3].lo = Vec3(-hx, hy - t, 0);  // wall +y
  parts[3].hi = Vec3(hx, hy, h);
  parts[4].lo = Vec3(-hx, -hy, 0);  // wall -y
  parts[4].hi = Vec3(hx, -hy + t, h);
  return parts;
}

BinModel draw_bin(const SceneConfig& config, Rng& rng) {
  BinModel bin;
  bin.width = rng.uniform(config.bin_width.lo, config.bin_width.hi);
  bin.length = rng.uniform(config.bin_length.lo, config.bin_length.hi);
  bin.height = rng.uniform(config.bin_height.lo, config.bin_height.hi);
  bin.validate();
  return bin;
}

SceneDraw draw_sample_geometry(const SceneConfig& config, const BinModel& bin,
                               Rng& rng) {
  SceneDraw draw;
  draw.bin = bin;

  // Bin pose: free z-rotation, bounded tilt about a random horizontal axis,
  // lateral placement, resting on the ground (lowest corner at z = 0).
  const double yaw = rng.uniform(0.0, 2.0 * kPi);
  const double tilt =
      rng.uniform(config.bin_tilt_deg.lo, config.bin_tilt_deg.hi) * kDegToRad;
  const double tilt_az = rng.uniform(0.0, 2.0 * kPi);
  const double center_x =
      rng.uniform(config.bin_center_xy.lo, config.bin_center_xy.hi);
  const double center_y =
      rng.uniform(config.bin_center_xy.lo, config.bin_center_xy.hi);

  const Vec3 tilt_axis(std::cos(tilt_az), std::sin(tilt_az), 0.0);
  const RotationMatrix rot =
      (Eigen::AngleAxisd(tilt, tilt_axis) * Eigen::AngleAxisd(yaw, Vec3::UnitZ()))
          .toRotationMatrix();

  double min_corner_z = std::numeric_limits<double>::infinity();
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {0, 1}) {
        const Vec3 corner(sx * bin.length / 2.0, sy * bin.width / 2.0,
                          sz * bin.height);
        min_corner_z = std::min(min_corner_z, (rot * corner).z());
      }
  draw.bin_pose =
      Pose{rot, Vec3(center_x, center_y, -min_corner_z)};

  // Camera: looks at the bin top center (with a little jitter) from the
  // configured height, tilted off straight-down by the drawn angle.
  const double cam_tilt =
      rng.uniform(config.camera_tilt_deg.lo, config.camera_tilt_deg.hi) *
      kDegToRad;
  const double cam_az = rng.uniform(0.0, 2.0 * kPi);
  const double cam_height =
      rng.uniform(config.camera_height.lo, config.camera_height.hi);
  const double jitter_x = rng.uniform(-0.05, 0.05);
  const double jitter_y = rng.uniform(-0.05, 0.05);

  const Vec3 look_at = draw.bin_pose.apply(Vec3(0, 0, bin.height)) +
                       Vec3(jitter_x, jitter_y, 0.0);
  const Vec3 view_dir(std::sin(cam_tilt) * std::cos(cam_az),
                      std::sin(cam_tilt) * std::sin(cam_az),
                      -std::cos(cam_tilt));
  const double dist = (cam_height - look_at.z()) / std::cos(cam_tilt);

  draw.camera.position = look_at - dist * view_dir;
  draw.camera.orientation.col(0) = Vec3(-std::sin(cam_az), std::cos(cam_az), 0.0);
  draw.camera.orientation.col(2) = view_dir;
  draw.camera.orientation.col(1) = view_dir.cross(draw.camera.orientation.col(0));
  draw.camera.focal_px = config.focal_px;
  draw.camera.width = config.image_width;
  draw.camera.height = config.image_height;

  draw.geometry.parts = bin_parts(bin, draw.bin_pose, config.wall_thickness);

  const int n_distractors = static_cast<int>(
      rng.uniform_int(config.distractor_count.lo, config.distractor_count.hi));
  const double bin_half_diag =
      std::hypot(bin.length / 2.0, bin.width / 2.0);
  for (int k = 0; k < n_distractors; ++k) {
    const double sx = rng.uniform(config.distractor_size.lo, config.distractor_size.hi);
    const double sy = rng.uniform(config.distractor_size.lo, config.distractor_size.hi);
    const double sz = rng.uniform(config.distractor_size.lo, config.distractor_size.hi);
    const double angle = rng.uniform(0.0, 2.0 * kPi);
    const double radius = bin_half_diag + std::hypot(sx, sy) / 2.0 + 0.05 +
                          rng.uniform(0.0, 0.25);
    const double yaw_d = rng.uniform(0.0, 2.0 * kPi);

    ObbPart box;
    box.rotation = Eigen::AngleAxisd(yaw_d, Vec3::UnitZ()).toRotationMatrix();
    box.origin = Vec3(center_x + radius * std::cos(angle),
                      center_y + radius * std::sin(angle), 0.0);
    box.lo = Vec3(-sx / 2.0, -sy / 2.0, 0.0);
    box.hi = Vec3(sx / 2.0, sy / 2.0, sz);
    draw.geometry.parts.push_back(box);
  }
  return draw;
}

StructuredPointCloud render_scan(const SceneGeometry& geometry,
                                 const Camera& camera,
                                 const SceneConfig& config,
                                 std::uint64_t seed) {
  return render_impl(geometry, camera, config, seed, true);
}

StructuredPointCloud render_scan_serial(const SceneGeometry& geometry,
                                        const Camera& camera,
                                        const SceneConfig& config,
                                        std::uint64_t seed) {
  return render_impl(geometry, camera, config, seed, false);
}

ScanSample sample_scene(const SceneConfig& config, std::uint64_t seed) {
  config.validate();

  Rng scene_rng(derive_seed(seed, kSceneStream, 0));
  const BinModel bin = draw_bin(config, scene_rng);

  Rng sample_rng(derive_seed(seed, kSampleStream, 0));
  const SceneDraw draw = draw_sample_geometry(config, bin, sample_rng);

  ScanSample sample;
  sample.cloud = render_scan(draw.geometry, draw.camera, config,
                             derive_seed(seed, kRenderStream, 0));
  sample.gt_pose = draw.bin_pose;
  sample.gt_segments = gt_top_segments(bin, draw.bin_pose);
  sample.bin = bin;
  sample.scene_id = "scene-" + std::to_string(seed);
  sample.sample_id = "sample-" + std::to_string(seed);
  return sample;
}

}  // namespace binpose
