#include "binpose/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "binpose/hull2d.hpp"
#include "binpose/pose_regression.hpp"
#include "binpose/rng.hpp"

namespace binpose {

void OracleNoiseConfig::validate() const {
  if (sigma < 0.0) throw ConfigInvalid("oracle sigma must be >= 0");
  if (drop_count < 0 || spurious_count < 0)
    throw ConfigInvalid("oracle drop/spurious counts must be >= 0");
  if (spurious_conf_lo < 0.0 || spurious_conf_hi > 1.0 ||
      spurious_conf_lo > spurious_conf_hi)
    throw ConfigInvalid("spurious confidence range must be within [0, 1]");
  if (confidence_sigma_rate < 0.0)
    throw ConfigInvalid("confidence_sigma_rate must be >= 0");
}

std::vector<LineSegment3> oracle_detect(const ScanSample& sample,
                                        const OracleNoiseConfig& cfg,
                                        std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);

  const double confidence =
      std::clamp(1.0 - cfg.sigma * cfg.confidence_sigma_rate, 0.0, 1.0);
  std::vector<LineSegment3> segments;
  segments.reserve(sample.gt_segments.size() +
                   static_cast<std::size_t>(cfg.spurious_count));
  for (const LineSegment3& gt : sample.gt_segments) {
    LineSegment3 s = gt;
    for (int k = 0; k < 3; ++k) s.a[k] += cfg.sigma * rng.normal();
    for (int k = 0; k < 3; ++k) s.b[k] += cfg.sigma * rng.normal();
    s.confidence = confidence;
    segments.push_back(s);
  }

  for (int i = 0; i < cfg.drop_count && !segments.empty(); ++i) {
    const auto idx = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(segments.size()) - 1));
    segments.erase(segments.begin() + static_cast<std::ptrdiff_t>(idx));
  }

  if (cfg.spurious_count > 0) {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (const LineSegment3& gt : sample.gt_segments) {
      lo = lo.cwiseMin(gt.a).cwiseMin(gt.b);
      hi = hi.cwiseMax(gt.a).cwiseMax(gt.b);
    }
    const Vec3 pad = 0.5 * (hi - lo) + Vec3::Constant(0.1);
    lo -= pad;
    hi += pad;
    for (int i = 0; i < cfg.spurious_count; ++i) {
      LineSegment3 s;
      for (int k = 0; k < 3; ++k) s.a[k] = rng.uniform(lo[k], hi[k]);
      for (int k = 0; k < 3; ++k) s.b[k] = rng.uniform(lo[k], hi[k]);
      if ((s.b - s.a).norm() < 1e-6) s.b += Vec3::Constant(0.05);
      s.confidence = rng.uniform(cfg.spurious_conf_lo, cfg.spurious_conf_hi);
      segments.push_back(s);
    }
  }
  return segments;
}

void RimDetectorConfig::validate() const {
  if (ransac_iterations < 1)
    throw ConfigInvalid("ransac_iterations must be >= 1");
  if (!(inlier_threshold > 0.0))
    throw ConfigInvalid("inlier_threshold must be positive");
  if (min_inliers < 3) throw ConfigInvalid("min_inliers must be >= 3");
  if (ground_margin < 0.0 || !(height_hist_bin > 0.0))
    throw ConfigInvalid("ground_margin/height_hist_bin invalid");
  if (!(max_plane_tilt_deg > 0.0) || max_plane_tilt_deg > 90.0)
    throw ConfigInvalid("max_plane_tilt_deg must be in (0, 90]");
  if (!(min_hull_area > 0.0))
    throw ConfigInvalid("min_hull_area must be positive");
  if (rect_method != "min_area_rect")
    throw ConfigInvalid("unknown rect_method '" + rect_method +
                        "' (implemented: min_area_rect)");
}

namespace {

struct PlaneCandidate {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;  // plane: normal . p == offset
  std::size_t inliers = 0;
  long long height_bin = std::numeric_limits<long long>::lowest();
};

std::vector<std::size_t> plane_inliers(const std::vector<Vec3>& pts,
                                       const Vec3& n, double d,
                                       double threshold) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (std::abs(n.dot(pts[i]) - d) <= threshold) idx.push_back(i);
  return idx;
}

}  // namespace

std::vector<LineSegment3> plane_rim_detect(const StructuredPointCloud& cloud,
                                           const RimDetectorConfig& cfg,
                                           std::uint64_t seed) {
  cfg.validate();
  const std::vector<Vec3> points = cloud.valid_points();
  if (points.size() < static_cast<std::size_t>(cfg.min_inliers))
    throw NoPlaneFound("not enough valid points");

  // Ground exclusion: the lowest well-populated height-histogram bin is the
  // support plane; everything within ground_margin above it is dropped.
  double z_min = std::numeric_limits<double>::infinity();
  double z_max = -z_min;
  for (const Vec3& p : points) {
    z_min = std::min(z_min, p.z());
    z_max = std::max(z_max, p.z());
  }
  const auto n_bins = static_cast<std::size_t>(
                          std::floor((z_max - z_min) / cfg.height_hist_bin)) +
                      1;
  std::vector<std::size_t> hist(n_bins, 0);
  for (const Vec3& p : points) {
    auto b = static_cast<std::size_t>((p.z() - z_min) / cfg.height_hist_bin);
    b = std::min(b, n_bins - 1);
    ++hist[b];
  }
  const std::size_t significant =
      std::max<std::size_t>(static_cast<std::size_t>(cfg.min_inliers),
                            points.size() / 50);
  double ground_z = z_min;
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (hist[b] >= significant) {
      ground_z = z_min + (static_cast<double>(b) + 0.5) * cfg.height_hist_bin;
      break;
    }
  }

  std::vector<Vec3> elevated;
  for (const Vec3& p : points)
    if (p.z() > ground_z + cfg.ground_margin) elevated.push_back(p);
  if (elevated.size() < static_cast<std::size_t>(cfg.min_inliers))
    throw NoPlaneFound("no elevated structure above the ground plane");

  // RANSAC; among qualifying planes prefer the highest (quantized mean
  // height), then the most populated. The rim is the top surface of the bin
  // walls, so height outranks raw inlier count.
  const double min_cos_tilt =
      std::cos(cfg.max_plane_tilt_deg * 3.1415926535897932385 / 180.0);
  Rng rng(seed);
  PlaneCandidate best;
  bool found = false;
  const auto n_elevated = static_cast<std::int64_t>(elevated.size());
  for (int iter = 0; iter < cfg.ransac_iterations; ++iter) {
    const auto i0 = static_cast<std::size_t>(rng.uniform_int(0, n_elevated - 1));
    const auto i1 = static_cast<std::size_t>(rng.uniform_int(0, n_elevated - 1));
    const auto i2 = static_cast<std::size_t>(rng.uniform_int(0, n_elevated - 1));
    if (i0 == i1 || i0 == i2 || i1 == i2) continue;

    Vec3 n = (elevated[i1] - elevated[i0]).cross(elevated[i2] - elevated[i0]);
    const double norm = n.norm();
    if (norm < 1e-12) continue;
    n /= norm;
    if (std::abs(n.z()) < min_cos_tilt) continue;
    const double d = n.dot(elevated[i0]);

    std::size_t count = 0;
    double z_sum = 0.0;
    for (const Vec3& p : elevated) {
      if (std::abs(n.dot(p) - d) <= cfg.inlier_threshold) {
        ++count;
        z_sum += p.z();
      }
    }
    if (count < static_cast<std::size_t>(cfg.min_inliers)) continue;

    const auto height_bin = static_cast<long long>(std::floor(
        (z_sum / static_cast<double>(count)) / cfg.height_hist_bin));
    if (!found || height_bin > best.height_bin ||
        (height_bin == best.height_bin && count > best.inliers)) {
      best = PlaneCandidate{n, d, count, height_bin};
      found = true;
    }
  }
  if (!found) throw NoPlaneFound("RANSAC found no qualifying elevated plane");

  // Two refinement rounds: least-squares plane on the inliers, then
  // re-collect.
  Vec3 normal = best.normal;
  double offset = best.offset;
  Vec3 centroid = Vec3::Zero();
  std::vector<std::size_t> inliers;
  for (int round = 0; round < 2; ++round) {
    inliers = plane_inliers(elevated, normal, offset, cfg.inlier_threshold);
    if (inliers.size() < static_cast<std::size_t>(cfg.min_inliers))
      throw NoPlaneFound("plane refinement lost its support");
    centroid = Vec3::Zero();
    for (std::size_t i : inliers) centroid += elevated[i];
    centroid /= static_cast<double>(inliers.size());

    Eigen::Matrix<double, Eigen::Dynamic, 3> centered(
        static_cast<Eigen::Index>(inliers.size()), 3);
    for (Eigen::Index r = 0; r < centered.rows(); ++r)
      centered.row(r) =
          (elevated[inliers[static_cast<std::size_t>(r)]] - centroid)
              .transpose();
    normal = fit_plane_normal(centered);
    offset = normal.dot(centroid);
  }
  const double confidence = static_cast<double>(inliers.size()) /
                            static_cast<double>(elevated.size());

  // Project inliers into plane coordinates and fit the enclosing rectangle.
  Vec3 u_axis = Vec3::UnitX() - normal.x() * normal;
  if (u_axis.norm() < 1e-6) u_axis = Vec3::UnitY() - normal.y() * normal;
  u_axis.normalize();
  const Vec3 v_axis = normal.cross(u_axis);

  std::vector<Vec2> projected;
  projected.reserve(inliers.size());
  for (std::size_t i : inliers) {
    const Vec3 rel = elevated[i] - centroid;
    projected.emplace_back(u_axis.dot(rel), v_axis.dot(rel));
  }
  const std::vector<Vec2> hull = convex_hull(std::move(projected));
  if (hull.size() < 3 || polygon_area(hull) < cfg.min_hull_area)
    throw DegenerateRim("plane inliers do not span a rim-sized region");

  const RectFit rect = min_area_rect(hull);
  std::array<Vec3, 4> corners;
  for (int k = 0; k < 4; ++k)
    corners[static_cast<std::size_t>(k)] =
        centroid + rect.corners[static_cast<std::size_t>(k)].x() * u_axis +
        rect.corners[static_cast<std::size_t>(k)].y() * v_axis;

  std::vector<LineSegment3> segments;
  for (int k = 0; k < 4; ++k)
    segments.push_back(LineSegment3{corners[static_cast<std::size_t>(k)],
                                    corners[static_cast<std::size_t>((k + 1) % 4)],
                                    confidence});
  return segments;
}

}  // namespace binpose
