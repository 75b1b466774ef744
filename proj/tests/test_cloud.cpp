#include <doctest.h>

#include <cmath>
#include <vector>

#include "binpose/cloud.hpp"
#include "binpose/rng.hpp"

using namespace binpose;

namespace {

StructuredPointCloud random_cloud(int width, int height, Rng& rng,
                                  double invalid_prob = 0.2,
                                  double scale = 2.0) {
  StructuredPointCloud cloud = StructuredPointCloud::make(width, height);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c)
      if (!rng.bernoulli(invalid_prob))
        cloud.set_point(r, c, Vec3(rng.normal() * scale, rng.normal() * scale,
                                   rng.uniform(0.0, scale)));
  return cloud;
}

bool clouds_identical(const StructuredPointCloud& a,
                      const StructuredPointCloud& b) {
  if (a.width != b.width || a.height != b.height) return false;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const bool na = std::isnan(a.data[i]), nb = std::isnan(b.data[i]);
    if (na != nb) return false;
    if (!na && a.data[i] != b.data[i]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("compute_channel_stats: two-point example") {
  StructuredPointCloud cloud = StructuredPointCloud::make(3, 1);
  cloud.set_point(0, 0, Vec3(0, 0, 0));
  cloud.set_point(0, 2, Vec3(2, 0, 0));
  const ChannelStats stats =
      compute_channel_stats(std::vector<StructuredPointCloud>{cloud});
  CHECK(stats.count == 2);
  CHECK(stats.mean[0] == doctest::Approx(1.0));
  CHECK(stats.stddev[0] == doctest::Approx(1.0));
  CHECK(stats.mean[1] == 0.0);
  CHECK(stats.stddev[1] == ChannelStats::sigma_floor);
  CHECK(stats.stddev[2] == ChannelStats::sigma_floor);
}

TEST_CASE("compute_channel_stats: constant channel hits the floor, not zero") {
  StructuredPointCloud cloud = StructuredPointCloud::make(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) cloud.set_point(r, c, Vec3(7.5, -1.25, 3.0));
  const ChannelStats stats =
      compute_channel_stats(std::vector<StructuredPointCloud>{cloud});
  for (int k = 0; k < 3; ++k) CHECK(stats.stddev[k] == ChannelStats::sigma_floor);
}

TEST_CASE("compute_channel_stats: matches a two-pass oracle") {
  Rng rng(31);
  std::vector<StructuredPointCloud> clouds;
  for (int i = 0; i < 4; ++i) clouds.push_back(random_cloud(17, 9, rng));

  const ChannelStats stats = compute_channel_stats(clouds);

  // Oracle: independent two-pass mean / variance.
  for (int k = 0; k < 3; ++k) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& cloud : clouds)
      for (int r = 0; r < cloud.height; ++r)
        for (int c = 0; c < cloud.width; ++c)
          if (cloud.is_valid(r, c)) {
            sum += cloud.point(r, c)[k];
            ++n;
          }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const auto& cloud : clouds)
      for (int r = 0; r < cloud.height; ++r)
        for (int c = 0; c < cloud.width; ++c)
          if (cloud.is_valid(r, c)) {
            const double d = cloud.point(r, c)[k] - mean;
            ss += d * d;
          }
    const double stddev = std::sqrt(ss / static_cast<double>(n));
    CHECK(stats.count == n);
    CHECK(stats.mean[k] == doctest::Approx(mean).epsilon(1e-12));
    CHECK(stats.stddev[k] == doctest::Approx(stddev).epsilon(1e-10));
  }
}

TEST_CASE("compute_channel_stats: no valid pixels") {
  const StructuredPointCloud empty = StructuredPointCloud::make(5, 5);
  CHECK_THROWS_AS(
      compute_channel_stats(std::vector<StructuredPointCloud>{empty}),
      NoValidPixels);
}

TEST_CASE("normalize: identity stats and a worked example") {
  Rng rng(32);
  const StructuredPointCloud cloud = random_cloud(8, 8, rng);
  ChannelStats identity;
  identity.count = 1;
  CHECK(clouds_identical(normalize(cloud, identity), cloud));

  StructuredPointCloud one = StructuredPointCloud::make(1, 1);
  one.set_point(0, 0, Vec3(3, 0, 0));
  ChannelStats stats;
  stats.mean = {1.0, 0.0, 0.0};
  stats.stddev = {2.0, 1.0, 1.0};
  stats.count = 1;
  CHECK(normalize(one, stats).point(0, 0).x() == doctest::Approx(1.0));
}

TEST_CASE("normalize: renormalized stats are zero mean, unit variance") {
  Rng rng(33);
  std::vector<StructuredPointCloud> clouds;
  for (int i = 0; i < 3; ++i) clouds.push_back(random_cloud(21, 13, rng));
  const ChannelStats stats = compute_channel_stats(clouds);

  std::vector<StructuredPointCloud> normalized;
  for (const auto& cloud : clouds) normalized.push_back(normalize(cloud, stats));
  const ChannelStats renorm = compute_channel_stats(normalized);
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(renorm.mean[k]) < 1e-9);
    CHECK(std::abs(renorm.stddev[k] - 1.0) < 1e-6);
  }
}

TEST_CASE("normalize: exactly invertible given the stats") {
  Rng rng(34);
  ChannelStats stats;
  stats.mean = {0.37, -1.2, 2.5};
  stats.stddev = {1.7, 0.04, 3.1};
  stats.count = 1;
  for (int i = 0; i < 1000; ++i) {
    const int channel = static_cast<int>(rng.uniform_int(0, 2));
    const double v = rng.normal() * 5.0;
    const double round_trip =
        stats.denormalize_value(channel, stats.normalize_value(channel, v));
    CHECK(round_trip == doctest::Approx(v).epsilon(1e-12));
  }

  const StructuredPointCloud cloud = random_cloud(9, 7, rng);
  const StructuredPointCloud round = denormalize(normalize(cloud, stats), stats);
  for (std::size_t i = 0; i < cloud.data.size(); ++i) {
    if (std::isnan(cloud.data[i])) {
      CHECK(std::isnan(round.data[i]));
    } else {
      CHECK(round.data[i] == doctest::Approx(cloud.data[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("cutout: probability zero is the identity for any seed") {
  Rng rng(35);
  const StructuredPointCloud cloud = random_cloud(12, 10, rng);
  CutoutConfig cfg;
  cfg.c_p = 0.0;
  for (std::uint64_t seed : {0ull, 1ull, 42ull, 999ull})
    CHECK(clouds_identical(cutout(cloud, cfg, seed), cloud));
}

TEST_CASE("cutout: quarter-area square on a 100x100 grid") {
  StructuredPointCloud cloud = StructuredPointCloud::make(100, 100);
  for (int r = 0; r < 100; ++r)
    for (int c = 0; c < 100; ++c) cloud.set_point(r, c, Vec3(1, 1, 1));

  CutoutConfig cfg;
  cfg.c_p = 1.0;
  cfg.c_min = 0.25;
  cfg.c_max = 0.25;
  cfg.aspect_min = 1.0;
  cfg.aspect_max = 1.0;
  // sqrt(0.25 * 10000) = 50 exactly: a 50x50 rectangle, 2500 pixels.
  const StructuredPointCloud cut = cutout(cloud, cfg, 7);
  CHECK(cloud.valid_count() - cut.valid_count() == 2500);
}

TEST_CASE("cutout: deterministic and never adds valid pixels") {
  Rng rng(36);
  const StructuredPointCloud cloud = random_cloud(30, 20, rng);
  CutoutConfig cfg;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const StructuredPointCloud a = cutout(cloud, cfg, seed);
    const StructuredPointCloud b = cutout(cloud, cfg, seed);
    CHECK(clouds_identical(a, b));
    for (int r = 0; r < cloud.height; ++r)
      for (int c = 0; c < cloud.width; ++c)
        if (a.is_valid(r, c)) CHECK(cloud.is_valid(r, c));
  }
}

TEST_CASE("cutout: application rate and area fraction bounds") {
  StructuredPointCloud cloud = StructuredPointCloud::make(100, 100);
  for (int r = 0; r < 100; ++r)
    for (int c = 0; c < 100; ++c) cloud.set_point(r, c, Vec3(1, 1, 1));

  CutoutConfig cfg;  // c_p = 0.5, c_min = 0.2, c_max = 0.8
  const std::size_t total = cloud.valid_count();
  int applied = 0;
  const int trials = 10000;
  for (int seed = 0; seed < trials; ++seed) {
    const StructuredPointCloud cut =
        cutout(cloud, cfg, static_cast<std::uint64_t>(seed));
    const std::size_t removed = total - cut.valid_count();
    if (removed == 0) continue;
    ++applied;
    const double fraction =
        static_cast<double>(removed) / static_cast<double>(total);
    CHECK(fraction >= 0.9 * cfg.c_min);
    CHECK(fraction <= cfg.c_max);
  }
  const double rate = static_cast<double>(applied) / trials;
  CHECK(rate >= 0.47);
  CHECK(rate <= 0.53);
}

TEST_CASE("cutout: invalid configs are rejected") {
  const StructuredPointCloud cloud = StructuredPointCloud::make(4, 4);
  CutoutConfig cfg;
  cfg.c_min = 0.9;
  cfg.c_max = 0.2;
  CHECK_THROWS_AS(cutout(cloud, cfg, 1), ConfigInvalid);
}

TEST_CASE("StatsAccumulator: streaming equals batch") {
  Rng rng(37);
  std::vector<StructuredPointCloud> clouds;
  for (int i = 0; i < 3; ++i) clouds.push_back(random_cloud(11, 6, rng));
  const ChannelStats batch = compute_channel_stats(clouds);

  StatsAccumulator acc;
  for (const auto& cloud : clouds) acc.add(cloud);
  const ChannelStats streamed = acc.finalize();
  CHECK(streamed.count == batch.count);
  for (int k = 0; k < 3; ++k) {
    CHECK(streamed.mean[k] == batch.mean[k]);
    CHECK(streamed.stddev[k] == batch.stddev[k]);
  }
}
