#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "binpose/cloud.hpp"
#include "binpose/detect.hpp"
#include "binpose/metrics.hpp"
#include "binpose/synth.hpp"

namespace binpose::io {

// On-disk formats. These are the stable interoperation contract; external
// detectors plug in by emitting the prediction schema.
//
// Scan file (binary, extension .bpc):
//   magic "BPC1" | u32 width | u32 height | u32 channels (3) |
//   u32 validity flag (1 = NaN-encoded invalid pixels)
//   then height x width pixels in row-major order, each pixel three
//   IEEE-754 binary32 little-endian values (x, y, z in meters). Invalid
//   pixels are stored as three quiet NaNs (0x7FC00000).
//
// Everything else (annotations, manifests, predictions, poses, stats,
// reports, configs) is JSON; numbers are serialized with shortest
// round-trip precision, so values survive write/read bit-exactly.

void write_scan(const StructuredPointCloud& cloud,
                const std::filesystem::path& path);
StructuredPointCloud read_scan(const std::filesystem::path& path);

struct SampleAnnotation {
  std::string sample_id;
  std::string scene_id;
  BinModel bin;
  Pose pose;
  std::vector<LineSegment3> segments;  // exactly 4
};

void write_annotation(const SampleAnnotation& annotation,
                      const std::filesystem::path& path);
SampleAnnotation read_annotation(const std::filesystem::path& path);

// Scan + annotation as one logical record.
void write_sample(const ScanSample& sample,
                  const std::filesystem::path& scan_path,
                  const std::filesystem::path& annotation_path);
ScanSample read_sample(const std::filesystem::path& scan_path,
                       const std::filesystem::path& annotation_path);

struct ManifestRecord {
  std::string sample_id;
  std::string scene_id;
  std::string scan;        // relative to the manifest directory
  std::string annotation;  // relative to the manifest directory
  std::string split;       // train | val | test
};

struct Manifest {
  std::vector<ManifestRecord> records;
  std::string stats;  // optional stats file, relative; empty if absent
  std::filesystem::path root;  // directory of the manifest file

  std::filesystem::path resolve(const std::string& relative) const {
    return root / relative;
  }
};

// Validates sample uniqueness, split tags, path resolvability and scene
// disjointness of the test split (a scene_id present in test must not
// appear in train or val).
Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const Manifest& manifest,
                   const std::filesystem::path& path);

void write_stats(const ChannelStats& stats, const std::filesystem::path& path);
ChannelStats read_stats(const std::filesystem::path& path);

struct PredictionRecord {
  std::string sample_id;
  std::string detector;
  std::vector<LineSegment3> segments;
};

void write_prediction(const PredictionRecord& prediction,
                      const std::filesystem::path& path);
PredictionRecord read_prediction(const std::filesystem::path& path);

// Index entries are (sample_id, path relative to the index directory).
struct FileIndex {
  std::string dataset_manifest;  // relative to the index directory
  std::string detector;          // empty for pose indexes
  std::vector<std::pair<std::string, std::string>> entries;
  std::filesystem::path root;

  std::filesystem::path resolve(const std::string& relative) const {
    return root / relative;
  }
};

void write_prediction_index(const FileIndex& index,
                            const std::filesystem::path& path);
FileIndex read_prediction_index(const std::filesystem::path& path);

void write_pose_file(const std::string& sample_id, const Pose& pose,
                     const std::filesystem::path& path);
std::pair<std::string, Pose> read_pose_file(const std::filesystem::path& path);

void write_pose_index(const FileIndex& index,
                      const std::filesystem::path& path);
FileIndex read_pose_index(const std::filesystem::path& path);

void write_report(const EvalReport& report,
                  const std::vector<std::string>& sample_ids,
                  const std::filesystem::path& path);
std::string format_report_table(const EvalReport& report,
                                const std::vector<std::string>& sample_ids);

void write_scene_config(const SceneConfig& config,
                        const std::filesystem::path& path);
SceneConfig read_scene_config(const std::filesystem::path& path);

// One file may carry settings for either or both detectors under the
// keys "oracle" and "rim"; missing keys keep defaults.
struct DetectorConfigs {
  OracleNoiseConfig oracle;
  RimDetectorConfig rim;
};

DetectorConfigs read_detector_configs(const std::filesystem::path& path);

}  // namespace binpose::io
