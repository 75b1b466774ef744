#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "binpose/types.hpp"

namespace binpose {

// Organized scan: an H x W pixel grid of 3D points in meters. Missing data
// is encoded as NaN in all three channels of a pixel, both in memory and on
// disk. Storage is row-major, xyz interleaved.
struct StructuredPointCloud {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  static StructuredPointCloud make(int width, int height);

  std::size_t index(int row, int col) const {
    return 3 * (static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(col));
  }
  bool is_valid(int row, int col) const {
    return !std::isnan(data[index(row, col)]);
  }
  Vec3 point(int row, int col) const {
    const std::size_t i = index(row, col);
    return Vec3(data[i], data[i + 1], data[i + 2]);
  }
  void set_point(int row, int col, const Vec3& p) {
    const std::size_t i = index(row, col);
    data[i] = p.x();
    data[i + 1] = p.y();
    data[i + 2] = p.z();
  }
  void set_invalid(int row, int col);

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  std::size_t valid_count() const;
  std::vector<Vec3> valid_points() const;
};

struct ChannelStats {
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  std::array<double, 3> stddev{1.0, 1.0, 1.0};  // floored at sigma_floor
  std::size_t count = 0;

  static constexpr double sigma_floor = 1e-6;

  double normalize_value(int channel, double v) const {
    return (v - mean[static_cast<std::size_t>(channel)]) /
           stddev[static_cast<std::size_t>(channel)];
  }
  double denormalize_value(int channel, double v) const {
    return v * stddev[static_cast<std::size_t>(channel)] +
           mean[static_cast<std::size_t>(channel)];
  }
};

// Per-channel mean and population (1/N) standard deviation over all valid
// pixels of all clouds. Both variants accumulate per-row partial sums and
// combine them in row order, so their results are bit-identical.
ChannelStats compute_channel_stats(std::span<const StructuredPointCloud> clouds);
ChannelStats compute_channel_stats_serial(
    std::span<const StructuredPointCloud> clouds);

// Streaming variant for datasets too large to hold in memory; clouds must be
// added in a fixed order for reproducible results.
struct StatsAccumulator {
  std::array<double, 3> sum{0.0, 0.0, 0.0};
  std::array<double, 3> sumsq{0.0, 0.0, 0.0};
  std::size_t count = 0;

  void add(const StructuredPointCloud& cloud);
  ChannelStats finalize() const;  // throws NoValidPixels when count == 0
};

StructuredPointCloud normalize(const StructuredPointCloud& cloud,
                               const ChannelStats& stats);
StructuredPointCloud normalize_serial(const StructuredPointCloud& cloud,
                                      const ChannelStats& stats);
StructuredPointCloud denormalize(const StructuredPointCloud& cloud,
                                 const ChannelStats& stats);

struct CutoutConfig {
  double c_p = 0.5;    // probability of applying the cutout
  double c_min = 0.2;  // minimum area fraction
  double c_max = 0.8;  // maximum area fraction
  double aspect_min = 0.5;
  double aspect_max = 2.0;

  void validate() const;
};

// With probability c_p invalidates a random rectangle whose area is a
// uniform fraction of the grid in [c_min, c_max] and whose aspect ratio is
// uniform in [aspect_min, aspect_max], placed uniformly fully inside the
// grid. Deterministic per (cloud, cfg, seed).
StructuredPointCloud cutout(const StructuredPointCloud& cloud,
                            const CutoutConfig& cfg, std::uint64_t seed);

}  // namespace binpose
