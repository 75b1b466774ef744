#include <doctest.h>

#include <atomic>
#include <numeric>
#include <vector>

#include "binpose/cloud.hpp"
#include "binpose/parallel.hpp"
#include "binpose/synth.hpp"

using namespace binpose;

TEST_CASE("parallel_for: covers every index exactly once") {
  for (int jobs : {1, 2, 8, 0}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), jobs, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) CHECK(h.load() == 1);
  }
  parallel_for(0, 4, [](std::size_t) { FAIL("body must not run for n = 0"); });
}

TEST_CASE("parallel_for: worker exceptions reach the caller") {
  CHECK_THROWS_AS(parallel_for(64, 4,
                               [](std::size_t i) {
                                 if (i == 17) throw ConfigInvalid("boom");
                               }),
                  ConfigInvalid);
}

TEST_CASE("OpenMP kernels match their serial references bit for bit") {
  SceneConfig config;
  config.image_width = 96;
  config.image_height = 64;
  config.noise_sigma = 0.002;
  config.dropout_prob = 0.02;
  config.distractor_count = IntRange{1, 2};

  Rng scene_rng(derive_seed(70, kSceneStream, 0));
  const BinModel bin = draw_bin(config, scene_rng);
  Rng sample_rng(derive_seed(70, kSampleStream, 0));
  const SceneDraw draw = draw_sample_geometry(config, bin, sample_rng);

  const StructuredPointCloud serial =
      render_scan_serial(draw.geometry, draw.camera, config, 31);
  const StructuredPointCloud parallel =
      render_scan(draw.geometry, draw.camera, config, 31);
  REQUIRE(serial.data.size() == parallel.data.size());
  for (std::size_t i = 0; i < serial.data.size(); ++i) {
    const bool nan_serial = std::isnan(serial.data[i]);
    CHECK(nan_serial == std::isnan(parallel.data[i]));
    if (!nan_serial) CHECK(serial.data[i] == parallel.data[i]);
  }

  const std::vector<StructuredPointCloud> clouds{serial, parallel, serial};
  const ChannelStats st_serial = compute_channel_stats_serial(clouds);
  const ChannelStats st_parallel = compute_channel_stats(clouds);
  CHECK(st_serial.count == st_parallel.count);
  for (int k = 0; k < 3; ++k) {
    CHECK(st_serial.mean[static_cast<std::size_t>(k)] ==
          st_parallel.mean[static_cast<std::size_t>(k)]);
    CHECK(st_serial.stddev[static_cast<std::size_t>(k)] ==
          st_parallel.stddev[static_cast<std::size_t>(k)]);
  }

  const StructuredPointCloud n_serial = normalize_serial(serial, st_serial);
  const StructuredPointCloud n_parallel = normalize(serial, st_serial);
  for (std::size_t i = 0; i < n_serial.data.size(); ++i) {
    const bool nan_serial = std::isnan(n_serial.data[i]);
    CHECK(nan_serial == std::isnan(n_parallel.data[i]));
    if (!nan_serial) CHECK(n_serial.data[i] == n_parallel.data[i]);
  }
}
