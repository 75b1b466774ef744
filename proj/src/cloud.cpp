#include "binpose/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "binpose/rng.hpp"

namespace binpose {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct RowPartial {
  std::array<double, 3> sum{0.0, 0.0, 0.0};
  std::array<double, 3> sumsq{0.0, 0.0, 0.0};
  std::size_t count = 0;
};

RowPartial row_partial(const StructuredPointCloud& cloud, int row) {
  RowPartial p;
  for (int col = 0; col < cloud.width; ++col) {
    const std::size_t i = cloud.index(row, col);
    if (std::isnan(cloud.data[i])) continue;
    for (int c = 0; c < 3; ++c) {
      const double v = cloud.data[i + static_cast<std::size_t>(c)];
      p.sum[static_cast<std::size_t>(c)] += v;
      p.sumsq[static_cast<std::size_t>(c)] += v * v;
    }
    ++p.count;
  }
  return p;
}

ChannelStats finalize_totals(const std::array<double, 3>& sum,
                             const std::array<double, 3>& sumsq,
                             std::size_t count) {
  if (count == 0) throw NoValidPixels("no valid pixels in input set");
  ChannelStats stats;
  stats.count = count;
  const double n = static_cast<double>(count);
  for (std::size_t k = 0; k < 3; ++k) {
    stats.mean[k] = sum[k] / n;
    const double var = std::max(0.0, sumsq[k] / n - stats.mean[k] * stats.mean[k]);
    stats.stddev[k] = std::max(std::sqrt(var), ChannelStats::sigma_floor);
  }
  return stats;
}

ChannelStats combine_partials(const std::vector<RowPartial>& partials) {
  RowPartial total;
  for (const RowPartial& p : partials) {
    for (std::size_t c = 0; c < 3; ++c) {
      total.sum[c] += p.sum[c];
      total.sumsq[c] += p.sumsq[c];
    }
    total.count += p.count;
  }
  return finalize_totals(total.sum, total.sumsq, total.count);
}

std::vector<std::pair<int, int>> all_rows(
    std::span<const StructuredPointCloud> clouds) {
  std::vector<std::pair<int, int>> rows;
  for (int ci = 0; ci < static_cast<int>(clouds.size()); ++ci)
    for (int r = 0; r < clouds[static_cast<std::size_t>(ci)].height; ++r)
      rows.emplace_back(ci, r);
  return rows;
}

StructuredPointCloud normalize_impl(const StructuredPointCloud& cloud,
                                    const ChannelStats& stats, bool parallel) {
  StructuredPointCloud out = cloud;
  const auto body = [&](int row) {
    for (int col = 0; col < out.width; ++col) {
      const std::size_t i = out.index(row, col);
      if (std::isnan(out.data[i])) continue;
      for (int c = 0; c < 3; ++c)
        out.data[i + static_cast<std::size_t>(c)] = stats.normalize_value(
            c, out.data[i + static_cast<std::size_t>(c)]);
    }
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int row = 0; row < out.height; ++row) body(row);
  } else {
    for (int row = 0; row < out.height; ++row) body(row);
  }
  return out;
}

}  // namespace

StructuredPointCloud StructuredPointCloud::make(int width, int height) {
  if (width < 1 || height < 1)
    throw ConfigInvalid("cloud dimensions must be positive");
  StructuredPointCloud cloud;
  cloud.width = width;
  cloud.height = height;
  cloud.data.assign(3 * cloud.pixel_count(), kNan);
  return cloud;
}

void StructuredPointCloud::set_invalid(int row, int col) {
  const std::size_t i = index(row, col);
  data[i] = kNan;
  data[i + 1] = kNan;
  data[i + 2] = kNan;
}

std::size_t StructuredPointCloud::valid_count() const {
  std::size_t n = 0;
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c)
      if (is_valid(r, c)) ++n;
  return n;
}

std::vector<Vec3> StructuredPointCloud::valid_points() const {
  std::vector<Vec3> pts;
  pts.reserve(valid_count());
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c)
      if (is_valid(r, c)) pts.push_back(point(r, c));
  return pts;
}

ChannelStats compute_channel_stats(
    std::span<const StructuredPointCloud> clouds) {
  const auto rows = all_rows(clouds);
  std::vector<RowPartial> partials(rows.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(rows.size()); ++i) {
    const auto& [ci, r] = rows[static_cast<std::size_t>(i)];
    partials[static_cast<std::size_t>(i)] =
        row_partial(clouds[static_cast<std::size_t>(ci)], r);
  }
  return combine_partials(partials);
}

ChannelStats compute_channel_stats_serial(
    std::span<const StructuredPointCloud> clouds) {
  const auto rows = all_rows(clouds);
  std::vector<RowPartial> partials(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    partials[i] = row_partial(clouds[static_cast<std::size_t>(rows[i].first)],
                              rows[i].second);
  return combine_partials(partials);
}

void StatsAccumulator::add(const StructuredPointCloud& cloud) {
  for (int r = 0; r < cloud.height; ++r) {
    const RowPartial p = row_partial(cloud, r);
    for (std::size_t c = 0; c < 3; ++c) {
      sum[c] += p.sum[c];
      sumsq[c] += p.sumsq[c];
    }
    count += p.count;
  }
}

ChannelStats StatsAccumulator::finalize() const {
  return finalize_totals(sum, sumsq, count);
}

StructuredPointCloud normalize(const StructuredPointCloud& cloud,
                               const ChannelStats& stats) {
  return normalize_impl(cloud, stats, true);
}

StructuredPointCloud normalize_serial(const StructuredPointCloud& cloud,
                                      const ChannelStats& stats) {
  return normalize_impl(cloud, stats, false);
}

StructuredPointCloud denormalize(const StructuredPointCloud& cloud,
                                 const ChannelStats& stats) {
  StructuredPointCloud out = cloud;
#pragma omp parallel for schedule(static)
  for (int row = 0; row < out.height; ++row) {
    for (int col = 0; col < out.width; ++col) {
      const std::size_t i = out.index(row, col);
      if (std::isnan(out.data[i])) continue;
      for (int c = 0; c < 3; ++c)
        out.data[i + static_cast<std::size_t>(c)] = stats.denormalize_value(
            c, out.data[i + static_cast<std::size_t>(c)]);
    }
  }
  return out;
}

void CutoutConfig::validate() const {
  if (c_p < 0.0 || c_p > 1.0)
    throw ConfigInvalid("cutout probability must be in [0, 1]");
  if (c_min < 0.0 || c_max > 1.0 || c_min > c_max)
    throw ConfigInvalid("cutout area fractions must satisfy 0 <= c_min <= c_max <= 1");
  if (!(aspect_min > 0.0) || aspect_min > aspect_max)
    throw ConfigInvalid("cutout aspect range must satisfy 0 < aspect_min <= aspect_max");
}

StructuredPointCloud cutout(const StructuredPointCloud& cloud,
                            const CutoutConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  StructuredPointCloud out = cloud;
  Rng rng(seed);
  if (!rng.bernoulli(cfg.c_p)) return out;

  const int w_grid = cloud.width, h_grid = cloud.height;
  const double fraction = rng.uniform(cfg.c_min, cfg.c_max);
  const double aspect = rng.uniform(cfg.aspect_min, cfg.aspect_max);
  const double target =
      fraction * static_cast<double>(w_grid) * static_cast<double>(h_grid);

  int w = static_cast<int>(std::floor(std::sqrt(target * aspect)));
  int h = static_cast<int>(std::floor(std::sqrt(target / aspect)));
  // Area-preserving clamp: a side that overflows the grid trades its excess
  // to the other side so the covered fraction stays within [c_min, c_max].
  if (w > w_grid) {
    w = w_grid;
    h = static_cast<int>(std::floor(target / static_cast<double>(w_grid)));
  } else if (h > h_grid) {
    h = h_grid;
    w = static_cast<int>(std::floor(target / static_cast<double>(h_grid)));
  }
  w = std::clamp(w, 1, w_grid);
  h = std::clamp(h, 1, h_grid);

  const int col0 = static_cast<int>(rng.uniform_int(0, w_grid - w));
  const int row0 = static_cast<int>(rng.uniform_int(0, h_grid - h));
  for (int row = row0; row < row0 + h; ++row)
    for (int col = col0; col < col0 + w; ++col) out.set_invalid(row, col);
  return out;
}

}  // namespace binpose
