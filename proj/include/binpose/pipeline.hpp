#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "binpose/cloud.hpp"
#include "binpose/io.hpp"
#include "binpose/metrics.hpp"
#include "binpose/synth.hpp"

namespace binpose::pipeline {

// Default seed used by every subcommand when none is given.
inline constexpr std::uint64_t kDefaultSeed = 42;

struct GenOptions {
  int samples = 100;
  std::uint64_t seed = kDefaultSeed;
  std::filesystem::path out;
  SceneConfig config;
  int jobs = 1;
};

// Writes out/scans/*.bpc, out/annotations/*.json, out/stats.json and
// out/manifest.json. Samples are grouped into scenes of
// config.samples_per_scene scans sharing one bin; scenes are assigned to
// train/val/test in order by the configured fractions, so splits are scene
// disjoint by construction. Returns the manifest path.
std::filesystem::path generate_dataset(const GenOptions& options);

struct AugmentOptions {
  std::filesystem::path in_manifest;
  std::filesystem::path out;
  CutoutConfig cutout;
  std::uint64_t seed = kDefaultSeed;
  int jobs = 1;
};

std::filesystem::path augment_dataset(const AugmentOptions& options);

struct DetectOptions {
  std::filesystem::path in_manifest;
  std::filesystem::path out;
  std::string detector = "oracle";  // oracle | rim
  io::DetectorConfigs configs;
  std::uint64_t seed = kDefaultSeed;
  int jobs = 1;
};

// Writes out/predictions/*.json and the out/predictions.json index.
std::filesystem::path run_detection(const DetectOptions& options);

struct EstimateOptions {
  std::filesystem::path in_index;  // predictions.json
  std::filesystem::path out;
  int jobs = 1;
};

// Writes out/poses/*.json and the out/poses.json index.
std::filesystem::path run_estimation(const EstimateOptions& options);

struct EvalOptions {
  std::filesystem::path in_index;  // poses.json
  std::filesystem::path out;       // defaults to the index directory
  bool symmetry_aware = false;
};

struct EvalResult {
  EvalReport report;
  std::vector<std::string> sample_ids;
  std::filesystem::path report_path;
};

EvalResult run_evaluation(const EvalOptions& options);

struct BenchOptions {
  int samples = 100;
  std::uint64_t seed = kDefaultSeed;
  std::filesystem::path out;
  SceneConfig config;
  CutoutConfig cutout;
  std::string detector = "oracle";
  io::DetectorConfigs detector_configs;
  bool symmetry_aware = false;
  int jobs = 1;
};

struct StageTiming {
  std::string name;
  double seconds = 0.0;
  std::size_t items = 0;
};

struct BenchResult {
  std::vector<StageTiming> stages;
  double total_seconds = 0.0;
  EvalResult eval;
  std::filesystem::path timing_path;
};

// gen -> augment -> detect -> estimate -> eval under options.out, with
// per-stage wall time. Artifacts are deterministic per (options, seed);
// only bench_timing.json varies between runs.
BenchResult run_bench(const BenchOptions& options);

std::string format_bench_table(const BenchResult& result);

}  // namespace binpose::pipeline
