#include "binpose/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "binpose/detect.hpp"
#include "binpose/parallel.hpp"
#include "binpose/pose_regression.hpp"
#include "binpose/rng.hpp"

namespace binpose::pipeline {

namespace fs = std::filesystem;

namespace {

std::string zero_pad(long long value, int digits) {
  std::ostringstream out;
  out << std::setw(digits) << std::setfill('0') << value;
  return std::move(out).str();
}

std::unordered_map<std::string, io::ManifestRecord> index_by_sample(
    const io::Manifest& manifest) {
  std::unordered_map<std::string, io::ManifestRecord> map;
  for (const io::ManifestRecord& rec : manifest.records)
    map.emplace(rec.sample_id, rec);
  return map;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace

fs::path generate_dataset(const GenOptions& options) {
  options.config.validate();
  if (options.samples < 1) throw ConfigInvalid("samples must be >= 1");

  const SceneConfig& config = options.config;
  fs::create_directories(options.out / "scans");
  fs::create_directories(options.out / "annotations");

  const int per_scene = config.samples_per_scene;
  const int n_scenes = (options.samples + per_scene - 1) / per_scene;
  const int n_train = static_cast<int>(n_scenes * config.train_fraction);
  const int n_val = static_cast<int>(n_scenes * config.val_fraction);

  std::vector<BinModel> scene_bins(static_cast<std::size_t>(n_scenes));
  for (int s = 0; s < n_scenes; ++s) {
    Rng rng(derive_seed(options.seed, kSceneStream,
                        static_cast<std::uint64_t>(s)));
    scene_bins[static_cast<std::size_t>(s)] = draw_bin(config, rng);
  }

  std::vector<io::ManifestRecord> records(
      static_cast<std::size_t>(options.samples));
  parallel_for(
      static_cast<std::size_t>(options.samples), options.jobs,
      [&](std::size_t k) {
        const int scene = static_cast<int>(k) / per_scene;
        const std::string scene_id = "scene-" + zero_pad(scene, 4);
        const std::string sample_id =
            scene_id + "-scan-" + zero_pad(static_cast<int>(k) % per_scene, 2);

        Rng rng(derive_seed(options.seed, kSampleStream, k));
        const SceneDraw draw = draw_sample_geometry(
            config, scene_bins[static_cast<std::size_t>(scene)], rng);

        ScanSample sample;
        sample.cloud = render_scan(draw.geometry, draw.camera, config,
                                   derive_seed(options.seed, kRenderStream, k));
        sample.gt_pose = draw.bin_pose;
        sample.gt_segments = gt_top_segments(draw.bin, draw.bin_pose);
        sample.bin = draw.bin;
        sample.scene_id = scene_id;
        sample.sample_id = sample_id;

        io::ManifestRecord rec;
        rec.sample_id = sample_id;
        rec.scene_id = scene_id;
        rec.scan = "scans/" + sample_id + ".bpc";
        rec.annotation = "annotations/" + sample_id + ".json";
        rec.split = scene < n_train          ? "train"
                    : scene < n_train + n_val ? "val"
                                              : "test";
        io::write_sample(sample, options.out / rec.scan,
                         options.out / rec.annotation);
        records[k] = std::move(rec);
      });

  // Dataset-level normalization statistics over the training split.
  StatsAccumulator acc;
  for (const io::ManifestRecord& rec : records)
    if (rec.split == "train")
      acc.add(io::read_scan(options.out / rec.scan));

  io::Manifest manifest;
  manifest.records = std::move(records);
  manifest.root = options.out;
  if (acc.count > 0) {
    io::write_stats(acc.finalize(), options.out / "stats.json");
    manifest.stats = "stats.json";
  }
  const fs::path manifest_path = options.out / "manifest.json";
  io::save_manifest(manifest, manifest_path);
  return manifest_path;
}

fs::path augment_dataset(const AugmentOptions& options) {
  options.cutout.validate();
  const io::Manifest manifest = io::load_manifest(options.in_manifest);
  fs::create_directories(options.out / "scans");
  fs::create_directories(options.out / "annotations");

  std::vector<io::ManifestRecord> records(manifest.records.size());
  parallel_for(manifest.records.size(), options.jobs, [&](std::size_t k) {
    const io::ManifestRecord& in = manifest.records[k];
    io::ManifestRecord rec = in;
    rec.scan = "scans/" + in.sample_id + ".bpc";
    rec.annotation = "annotations/" + in.sample_id + ".json";

    const StructuredPointCloud cloud = io::read_scan(manifest.resolve(in.scan));
    io::write_scan(cutout(cloud, options.cutout,
                          derive_seed(options.seed, kAugmentStream, k)),
                   options.out / rec.scan);
    fs::copy_file(manifest.resolve(in.annotation), options.out / rec.annotation,
                  fs::copy_options::overwrite_existing);
    records[k] = std::move(rec);
  });

  StatsAccumulator acc;
  for (const io::ManifestRecord& rec : records)
    if (rec.split == "train")
      acc.add(io::read_scan(options.out / rec.scan));

  io::Manifest out_manifest;
  out_manifest.records = std::move(records);
  out_manifest.root = options.out;
  if (acc.count > 0) {
    io::write_stats(acc.finalize(), options.out / "stats.json");
    out_manifest.stats = "stats.json";
  }
  const fs::path manifest_path = options.out / "manifest.json";
  io::save_manifest(out_manifest, manifest_path);
  return manifest_path;
}

fs::path run_detection(const DetectOptions& options) {
  if (options.detector != "oracle" && options.detector != "rim")
    throw ConfigInvalid("unknown detector '" + options.detector +
                        "' (available: oracle, rim)");
  const io::Manifest manifest = io::load_manifest(options.in_manifest);
  fs::create_directories(options.out / "predictions");

  io::FileIndex index;
  index.detector = options.detector;
  index.dataset_manifest =
      fs::relative(fs::absolute(options.in_manifest), fs::absolute(options.out))
          .generic_string();
  index.entries.resize(manifest.records.size());

  parallel_for(manifest.records.size(), options.jobs, [&](std::size_t k) {
    const io::ManifestRecord& rec = manifest.records[k];
    const std::uint64_t seed = derive_seed(options.seed, kDetectStream, k);

    std::vector<LineSegment3> segments;
    if (options.detector == "oracle") {
      const io::SampleAnnotation annotation =
          io::read_annotation(manifest.resolve(rec.annotation));
      ScanSample sample;
      sample.gt_pose = annotation.pose;
      sample.gt_segments = annotation.segments;
      sample.bin = annotation.bin;
      segments = oracle_detect(sample, options.configs.oracle, seed);
    } else {
      const StructuredPointCloud cloud = io::read_scan(manifest.resolve(rec.scan));
      segments = plane_rim_detect(cloud, options.configs.rim, seed);
    }
    const std::string rel = "predictions/" + rec.sample_id + ".json";
    io::write_prediction(
        io::PredictionRecord{rec.sample_id, options.detector, segments},
        options.out / rel);
    index.entries[k] = {rec.sample_id, rel};
  });

  const fs::path index_path = options.out / "predictions.json";
  io::write_prediction_index(index, index_path);
  return index_path;
}

fs::path run_estimation(const EstimateOptions& options) {
  const io::FileIndex predictions = io::read_prediction_index(options.in_index);
  const io::Manifest manifest =
      io::load_manifest(predictions.resolve(predictions.dataset_manifest));
  const auto by_sample = index_by_sample(manifest);
  fs::create_directories(options.out / "poses");

  io::FileIndex index;
  index.dataset_manifest =
      fs::relative(fs::absolute(predictions.root) / predictions.dataset_manifest,
                   fs::absolute(options.out))
          .generic_string();
  index.entries.resize(predictions.entries.size());

  parallel_for(predictions.entries.size(), options.jobs, [&](std::size_t k) {
    const auto& [sample_id, rel] = predictions.entries[k];
    const auto it = by_sample.find(sample_id);
    if (it == by_sample.end())
      throw SchemaMismatch("prediction for unknown sample '" + sample_id + "'");

    const io::PredictionRecord prediction =
        io::read_prediction(predictions.resolve(rel));
    const io::SampleAnnotation annotation =
        io::read_annotation(manifest.resolve(it->second.annotation));
    const Pose pose = estimate_pose(prediction.segments, annotation.bin);

    const std::string out_rel = "poses/" + sample_id + ".json";
    io::write_pose_file(sample_id, pose, options.out / out_rel);
    index.entries[k] = {sample_id, out_rel};
  });

  const fs::path index_path = options.out / "poses.json";
  io::write_pose_index(index, index_path);
  return index_path;
}

EvalResult run_evaluation(const EvalOptions& options) {
  const io::FileIndex poses = io::read_pose_index(options.in_index);
  const io::Manifest manifest =
      io::load_manifest(poses.resolve(poses.dataset_manifest));
  if (poses.entries.size() != manifest.records.size())
    throw LengthMismatch(std::to_string(poses.entries.size()) + " poses vs " +
                         std::to_string(manifest.records.size()) +
                         " dataset samples");
  const auto by_sample = index_by_sample(manifest);

  std::vector<Pose> predictions, ground_truths;
  std::vector<std::string> ids;
  for (const auto& [sample_id, rel] : poses.entries) {
    const auto it = by_sample.find(sample_id);
    if (it == by_sample.end())
      throw SchemaMismatch("pose for unknown sample '" + sample_id + "'");
    predictions.push_back(io::read_pose_file(poses.resolve(rel)).second);
    ground_truths.push_back(
        io::read_annotation(manifest.resolve(it->second.annotation)).pose);
    ids.push_back(sample_id);
  }

  EvalResult result;
  result.report =
      evaluate_set(predictions, ground_truths, options.symmetry_aware);
  result.sample_ids = std::move(ids);
  const fs::path out_dir =
      options.out.empty() ? fs::absolute(options.in_index).parent_path()
                          : options.out;
  result.report_path = out_dir / "report.json";
  io::write_report(result.report, result.sample_ids, result.report_path);
  return result;
}

BenchResult run_bench(const BenchOptions& options) {
  BenchResult result;
  const auto n = static_cast<std::size_t>(options.samples);
  const auto timed = [&](const std::string& name, auto&& stage) {
    const auto start = std::chrono::steady_clock::now();
    auto value = stage();
    result.stages.push_back(StageTiming{name, seconds_since(start), n});
    return value;
  };

  const fs::path dataset = timed("generate", [&] {
    return generate_dataset(GenOptions{options.samples, options.seed,
                                       options.out / "dataset", options.config,
                                       options.jobs});
  });
  const fs::path augmented = timed("augment", [&] {
    return augment_dataset(AugmentOptions{dataset, options.out / "augmented",
                                          options.cutout, options.seed,
                                          options.jobs});
  });
  const fs::path predictions = timed("detect", [&] {
    return run_detection(DetectOptions{augmented, options.out / "detections",
                                       options.detector,
                                       options.detector_configs, options.seed,
                                       options.jobs});
  });
  const fs::path poses = timed("estimate", [&] {
    return run_estimation(
        EstimateOptions{predictions, options.out / "estimates", options.jobs});
  });
  result.eval = timed("evaluate", [&] {
    return run_evaluation(
        EvalOptions{poses, options.out, options.symmetry_aware});
  });

  for (const StageTiming& stage : result.stages)
    result.total_seconds += stage.seconds;

  // Timing varies run to run; everything else under out/ is deterministic.
  result.timing_path = options.out / "bench_timing.json";
  std::ostringstream timing;
  timing << "{\n  \"stages\": [\n";
  for (std::size_t i = 0; i < result.stages.size(); ++i) {
    const StageTiming& s = result.stages[i];
    timing << "    {\"name\": \"" << s.name << "\", \"seconds\": " << s.seconds
           << ", \"samples_per_second\": "
           << (s.seconds > 0.0 ? static_cast<double>(s.items) / s.seconds : 0.0)
           << "}" << (i + 1 < result.stages.size() ? "," : "") << "\n";
  }
  timing << "  ],\n  \"total_seconds\": " << result.total_seconds << "\n}\n";
  std::ofstream(result.timing_path) << timing.str();
  return result;
}

std::string format_bench_table(const BenchResult& result) {
  std::ostringstream out;
  out << std::left << std::setw(12) << "stage" << std::right << std::setw(12)
      << "seconds" << std::setw(16) << "samples/s" << "\n";
  out << std::string(40, '-') << "\n";
  out << std::fixed << std::setprecision(3);
  for (const StageTiming& s : result.stages) {
    out << std::left << std::setw(12) << s.name << std::right << std::setw(12)
        << s.seconds << std::setw(16)
        << (s.seconds > 0.0 ? static_cast<double>(s.items) / s.seconds : 0.0)
        << "\n";
  }
  out << std::string(40, '-') << "\n";
  out << std::left << std::setw(12) << "total" << std::right << std::setw(12)
      << result.total_seconds << "\n";
  return std::move(out).str();
}

}  // namespace binpose::pipeline
