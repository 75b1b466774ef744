#include "binpose/io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace binpose::io {

namespace {

using nlohmann::ordered_json;

static_assert(std::endian::native == std::endian::little,
              "scan writer assumes a little-endian host");

constexpr std::array<char, 4> kScanMagic{'B', 'P', 'C', '1'};
constexpr std::uint32_t kScanChannels = 3;
constexpr std::uint32_t kValidityNanEncoded = 1;
constexpr std::uint32_t kQuietNanBits = 0x7FC00000u;

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

std::uint32_t get_u32(const char* p) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(p[0])) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(p[1])) << 8) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(p[2])) << 16) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(p[3])) << 24);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptFile("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CorruptFile("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CorruptFile("write failed for " + path.string());
}

ordered_json parse_json_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw CorruptFile("invalid JSON in " + path.string());
  return j;
}

void write_json_file(const ordered_json& j,
                     const std::filesystem::path& path) {
  write_file(path, j.dump(2) + "\n");
}

const ordered_json& require(const ordered_json& j, const char* key,
                            const std::filesystem::path& path) {
  const auto it = j.find(key);
  if (it == j.end())
    throw SchemaMismatch("missing key '" + std::string(key) + "' in " +
                         path.string());
  return *it;
}

std::array<double, 3> to_triple(const ordered_json& j,
                                const std::filesystem::path& path) {
  if (!j.is_array() || j.size() != 3)
    throw SchemaMismatch("expected a 3-vector in " + path.string());
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

ordered_json vec3_json(const Vec3& v) {
  return ordered_json::array({v.x(), v.y(), v.z()});
}

Vec3 vec3_from(const ordered_json& j, const std::filesystem::path& path) {
  const auto t = to_triple(j, path);
  return Vec3(t[0], t[1], t[2]);
}

ordered_json pose_json(const Pose& pose) {
  ordered_json rot = ordered_json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot.push_back(pose.rotation(r, c));
  return ordered_json{{"rotation", rot},
                      {"translation", vec3_json(pose.translation)}};
}

Pose pose_from(const ordered_json& j, const std::filesystem::path& path) {
  const ordered_json& rot = require(j, "rotation", path);
  if (!rot.is_array() || rot.size() != 9)
    throw SchemaMismatch("pose rotation must have 9 values in " +
                         path.string());
  Pose pose;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      pose.rotation(r, c) = rot[static_cast<std::size_t>(3 * r + c)].get<double>();
  pose.translation = vec3_from(require(j, "translation", path), path);
  return pose;
}

ordered_json segment_json(const LineSegment3& s) {
  return ordered_json{{"a", vec3_json(s.a)},
                      {"b", vec3_json(s.b)},
                      {"confidence", s.confidence}};
}

LineSegment3 segment_from(const ordered_json& j,
                          const std::filesystem::path& path) {
  LineSegment3 s;
  s.a = vec3_from(require(j, "a", path), path);
  s.b = vec3_from(require(j, "b", path), path);
  s.confidence = require(j, "confidence", path).get<double>();
  return s;
}

ordered_json range_json(const Range& r) {
  return ordered_json::array({r.lo, r.hi});
}

Range range_from(const ordered_json& j, const std::filesystem::path& path) {
  if (!j.is_array() || j.size() != 2)
    throw SchemaMismatch("expected a [lo, hi] range in " + path.string());
  return Range{j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

void write_scan(const StructuredPointCloud& cloud,
                const std::filesystem::path& path) {
  std::string bytes;
  bytes.reserve(20 + 12 * cloud.pixel_count());
  bytes.append(kScanMagic.data(), kScanMagic.size());
  put_u32(bytes, static_cast<std::uint32_t>(cloud.width));
  put_u32(bytes, static_cast<std::uint32_t>(cloud.height));
  put_u32(bytes, kScanChannels);
  put_u32(bytes, kValidityNanEncoded);

  for (double v : cloud.data) {
    std::uint32_t bits;
    if (std::isnan(v)) {
      bits = kQuietNanBits;
    } else {
      bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    }
    put_u32(bytes, bits);
  }
  write_file(path, bytes);
}

StructuredPointCloud read_scan(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() < 20 ||
      std::memcmp(bytes.data(), kScanMagic.data(), kScanMagic.size()) != 0)
    throw CorruptFile("bad magic in " + path.string());

  const std::uint32_t width = get_u32(bytes.data() + 4);
  const std::uint32_t height = get_u32(bytes.data() + 8);
  const std::uint32_t channels = get_u32(bytes.data() + 12);
  const std::uint32_t validity = get_u32(bytes.data() + 16);
  if (width < 1 || height < 1)
    throw CorruptFile("bad dimensions in " + path.string());
  if (channels != kScanChannels || validity != kValidityNanEncoded)
    throw CorruptFile("unsupported layout in " + path.string());

  const std::size_t expected =
      20 + 12 * static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() != expected)
    throw CorruptFile("truncated scan payload in " + path.string());

  StructuredPointCloud cloud = StructuredPointCloud::make(
      static_cast<int>(width), static_cast<int>(height));
  const char* p = bytes.data() + 20;
  for (std::size_t i = 0; i < cloud.data.size(); ++i, p += 4) {
    const float f = std::bit_cast<float>(get_u32(p));
    cloud.data[i] = static_cast<double>(f);
  }
  // A pixel with any non-finite channel is treated as missing data.
  for (int r = 0; r < cloud.height; ++r)
    for (int c = 0; c < cloud.width; ++c) {
      const std::size_t i = cloud.index(r, c);
      if (!std::isfinite(cloud.data[i]) || !std::isfinite(cloud.data[i + 1]) ||
          !std::isfinite(cloud.data[i + 2]))
        cloud.set_invalid(r, c);
    }
  return cloud;
}

void write_annotation(const SampleAnnotation& annotation,
                      const std::filesystem::path& path) {
  ordered_json segs = ordered_json::array();
  for (const LineSegment3& s : annotation.segments) segs.push_back(segment_json(s));
  const ordered_json j{
      {"sample_id", annotation.sample_id},
      {"scene_id", annotation.scene_id},
      {"bin",
       {{"width", annotation.bin.width},
        {"length", annotation.bin.length},
        {"height", annotation.bin.height}}},
      {"pose", pose_json(annotation.pose)},
      {"segments", segs}};
  write_json_file(j, path);
}

SampleAnnotation read_annotation(const std::filesystem::path& path) {
  const ordered_json j = parse_json_file(path);
  SampleAnnotation a;
  a.sample_id = require(j, "sample_id", path).get<std::string>();
  a.scene_id = require(j, "scene_id", path).get<std::string>();
  const ordered_json& bin = require(j, "bin", path);
  a.bin.width = require(bin, "width", path).get<double>();
  a.bin.length = require(bin, "length", path).get<double>();
  a.bin.height = require(bin, "height", path).get<double>();
  a.pose = pose_from(require(j, "pose", path), path);
  const ordered_json& segs = require(j, "segments", path);
  if (!segs.is_array() || segs.size() != 4)
    throw SchemaMismatch("annotation must contain exactly 4 segments: " +
                         path.string());
  for (const auto& s : segs) a.segments.push_back(segment_from(s, path));
  return a;
}

void write_sample(const ScanSample& sample,
                  const std::filesystem::path& scan_path,
                  const std::filesystem::path& annotation_path) {
  write_scan(sample.cloud, scan_path);
  write_annotation(SampleAnnotation{sample.sample_id, sample.scene_id,
                                    sample.bin, sample.gt_pose,
                                    sample.gt_segments},
                   annotation_path);
}

ScanSample read_sample(const std::filesystem::path& scan_path,
                       const std::filesystem::path& annotation_path) {
  const SampleAnnotation a = read_annotation(annotation_path);
  ScanSample sample;
  sample.cloud = read_scan(scan_path);
  sample.gt_pose = a.pose;
  sample.gt_segments = a.segments;
  sample.bin = a.bin;
  sample.scene_id = a.scene_id;
  sample.sample_id = a.sample_id;
  return sample;
}

Manifest load_manifest(const std::filesystem::path& path) {
  const ordered_json j = parse_json_file(path);
  Manifest manifest;
  manifest.root = std::filesystem::absolute(path).parent_path();
  if (j.contains("stats") && !j["stats"].is_null())
    manifest.stats = j["stats"].get<std::string>();

  const ordered_json& samples = require(j, "samples", path);
  if (!samples.is_array())
    throw SchemaMismatch("'samples' must be an array in " + path.string());

  std::set<std::string> seen_ids;
  std::unordered_map<std::string, std::set<std::string>> scene_splits;
  for (const auto& s : samples) {
    ManifestRecord rec;
    rec.sample_id = require(s, "sample_id", path).get<std::string>();
    rec.scene_id = require(s, "scene_id", path).get<std::string>();
    rec.scan = require(s, "scan", path).get<std::string>();
    rec.annotation = require(s, "annotation", path).get<std::string>();
    rec.split = require(s, "split", path).get<std::string>();
    if (rec.split != "train" && rec.split != "val" && rec.split != "test")
      throw SchemaMismatch("unknown split '" + rec.split + "' in " +
                           path.string());
    if (!seen_ids.insert(rec.sample_id).second)
      throw DuplicateSample(rec.sample_id + " appears twice in " +
                            path.string());
    for (const std::string& rel : {rec.scan, rec.annotation})
      if (!std::filesystem::exists(manifest.resolve(rel)))
        throw SchemaMismatch("referenced file missing: " + rel + " (from " +
                             path.string() + ")");
    scene_splits[rec.scene_id].insert(rec.split);
    manifest.records.push_back(std::move(rec));
  }
  if (!manifest.stats.empty() &&
      !std::filesystem::exists(manifest.resolve(manifest.stats)))
    throw SchemaMismatch("referenced stats file missing: " + manifest.stats);

  // Scenes reserved for test must not leak into train or val.
  for (const auto& [scene, splits] : scene_splits)
    if (splits.count("test") && splits.size() > 1)
      throw SplitLeakage("scene '" + scene +
                         "' appears in test and another split");
  return manifest;
}

void save_manifest(const Manifest& manifest,
                   const std::filesystem::path& path) {
  ordered_json samples = ordered_json::array();
  for (const ManifestRecord& rec : manifest.records)
    samples.push_back(ordered_json{{"sample_id", rec.sample_id},
                                   {"scene_id", rec.scene_id},
                                   {"scan", rec.scan},
                                   {"annotation", rec.annotation},
                                   {"split", rec.split}});
  ordered_json j;
  if (manifest.stats.empty())
    j["stats"] = nullptr;
  else
    j["stats"] = manifest.stats;
  j["samples"] = samples;
  write_json_file(j, path);
}

void write_stats(const ChannelStats& stats,
                 const std::filesystem::path& path) {
  const ordered_json j{
      {"count", stats.count},
      {"mean", ordered_json::array({stats.mean[0], stats.mean[1], stats.mean[2]})},
      {"stddev", ordered_json::array(
                     {stats.stddev[0], stats.stddev[1], stats.stddev[2]})}};
  write_json_file(j, path);
}

ChannelStats read_stats(const std::filesystem::path& path) {
  const ordered_json j = parse_json_file(path);
  ChannelStats stats;
  stats.count = require(j, "count", path).get<std::size_t>();
  const auto mean = to_triple(require(j, "mean", path), path);
  const auto stddev = to_triple(require(j, "stddev", path), path);
  stats.mean = mean;
  stats.stddev = stddev;
  return stats;
}

void write_prediction(const PredictionRecord& prediction,
                      const std::filesystem::path& path) {
  ordered_json segs = ordered_json::array();
  for (const LineSegment3& s : prediction.segments)
    segs.push_back(segment_json(s));
  write_json_file(ordered_json{{"sample_id", prediction.sample_id},
                               {"detector", prediction.detector},
                               {"segments", segs}},
                  path);
}

PredictionRecord read_prediction(const std::filesystem::path& path) {
  const ordered_json j = parse_json_file(path);
  PredictionRecord rec;
  rec.sample_id = require(j, "sample_id", path).get<std::string>();
  rec.detector = require(j, "detector", path).get<std::string>();
  const ordered_json& segs = require(j, "segments", path);
  if (!segs.is_array())
    throw SchemaMismatch("'segments' must be an array in " + path.string());
  for (const auto& s : segs) rec.segments.push_back(segment_from(s, path));
  return rec;
}

namespace {

void write_index(const FileIndex& index, const char* list_key,
                 const std::filesystem::path& path) {
  ordered_json entries = ordered_json::array();
  for (const auto& [id, rel] : index.entries)
    entries.push_back(ordered_json{{"sample_id", id}, {"path", rel}});
  ordered_json j{{"dataset_manifest", index.dataset_manifest}};
  if (!index.detector.empty()) j["detector"] = index.detector;
  j[list_key] = entries;
  write_json_file(j, path);
}

FileIndex read_index(const char* list_key,
                     const std::filesystem::path& path) {
  const ordered_json j = parse_json_file(path);
  FileIndex index;
  index.root = std::filesystem::absolute(path).parent_path();
  index.dataset_manifest =
      require(j, "dataset_manifest", path).get<std::string>();
  if (j.contains("detector")) index.detector = j["detector"].get<std::string>();
  for (const auto& e : require(j, list_key, path)) {
    index.entries.emplace_back(require(e, "sample_id", path).get<std::string>(),
                               require(e, "path", path).get<std::string>());
  }
  return index;
}

}  // namespace

void write_prediction_index(const FileIndex& index,
                            const std::filesystem::path& path) {
  write_index(index, "predictions", path);
}

FileIndex read_prediction_index(const std::filesystem::path& path) {
  return read_index("predictions", path);
}

void write_pose_file(const std::string& sample_id, const Pose& pose,
                     const std::filesystem::path& path) {
  write_json_file(
      ordered_json{{"sample_id", sample_id}, {"pose", pose_json(pose)}}, path);
}

std::pair<std::string, Pose> read_pose_file(
    const std::filesystem::path& path) {
  const ordered_json j = parse_json_file(path);
  return {require(j, "sample_id", path).get<std::string>(),
          pose_from(require(j, "pose", path), path)};
}

void write_pose_index(const FileIndex& index,
                      const std::filesystem::path& path) {
  write_index(index, "poses", path);
}

FileIndex read_pose_index(const std::filesystem::path& path) {
  return read_index("poses", path);
}

void write_report(const EvalReport& report,
                  const std::vector<std::string>& sample_ids,
                  const std::filesystem::path& path) {
  ordered_json samples = ordered_json::array();
  for (std::size_t i = 0; i < report.samples.size(); ++i) {
    ordered_json s{{"te_m", report.samples[i].te_m},
                   {"re_deg", report.samples[i].re_deg}};
    if (i < sample_ids.size()) s["sample_id"] = sample_ids[i];
    samples.push_back(std::move(s));
  }
  write_json_file(ordered_json{{"count", report.count},
                               {"symmetry_aware", report.symmetry_aware},
                               {"mean_te_cm", report.mean_te_cm},
                               {"mean_re_deg", report.mean_re_deg},
                               {"samples", samples}},
                  path);
}

std::string format_report_table(const EvalReport& report,
                                const std::vector<std::string>& sample_ids) {
  std::ostringstream out;
  out << std::left << std::setw(28) << "sample" << std::right << std::setw(12)
      << "e_TE [cm]" << std::setw(12) << "e_RE [deg]" << "\n";
  out << std::string(52, '-') << "\n";
  out << std::fixed << std::setprecision(3);
  for (std::size_t i = 0; i < report.samples.size(); ++i) {
    const std::string id =
        i < sample_ids.size() ? sample_ids[i] : std::to_string(i);
    out << std::left << std::setw(28) << id << std::right << std::setw(12)
        << report.samples[i].te_m * 100.0 << std::setw(12)
        << report.samples[i].re_deg << "\n";
  }
  out << std::string(52, '-') << "\n";
  out << std::left << std::setw(28)
      << ("mean (" + std::to_string(report.count) + " samples)") << std::right
      << std::setw(12) << report.mean_te_cm << std::setw(12)
      << report.mean_re_deg << "\n";
  return std::move(out).str();
}

void write_scene_config(const SceneConfig& config,
                        const std::filesystem::path& path) {
  const ordered_json j{
      {"bin_width", range_json(config.bin_width)},
      {"bin_length", range_json(config.bin_length)},
      {"bin_height", range_json(config.bin_height)},
      {"bin_tilt_deg", range_json(config.bin_tilt_deg)},
      {"bin_center_xy", range_json(config.bin_center_xy)},
      {"wall_thickness", config.wall_thickness},
      {"camera_height", range_json(config.camera_height)},
      {"camera_tilt_deg", range_json(config.camera_tilt_deg)},
      {"image_width", config.image_width},
      {"image_height", config.image_height},
      {"focal_px", config.focal_px},
      {"noise_sigma", config.noise_sigma},
      {"dropout_prob", config.dropout_prob},
      {"distractor_count",
       ordered_json::array({config.distractor_count.lo, config.distractor_count.hi})},
      {"distractor_size", range_json(config.distractor_size)},
      {"samples_per_scene", config.samples_per_scene},
      {"train_fraction", config.train_fraction},
      {"val_fraction", config.val_fraction}};
  write_json_file(j, path);
}

SceneConfig read_scene_config(const std::filesystem::path& path) {
  const ordered_json j = parse_json_file(path);
  SceneConfig c;
  const auto opt_range = [&](const char* key, Range& target) {
    if (j.contains(key)) target = range_from(j[key], path);
  };
  opt_range("bin_width", c.bin_width);
  opt_range("bin_length", c.bin_length);
  opt_range("bin_height", c.bin_height);
  opt_range("bin_tilt_deg", c.bin_tilt_deg);
  opt_range("bin_center_xy", c.bin_center_xy);
  opt_range("camera_height", c.camera_height);
  opt_range("camera_tilt_deg", c.camera_tilt_deg);
  opt_range("distractor_size", c.distractor_size);
  if (j.contains("wall_thickness"))
    c.wall_thickness = j["wall_thickness"].get<double>();
  if (j.contains("image_width")) c.image_width = j["image_width"].get<int>();
  if (j.contains("image_height")) c.image_height = j["image_height"].get<int>();
  if (j.contains("focal_px")) c.focal_px = j["focal_px"].get<double>();
  if (j.contains("noise_sigma")) c.noise_sigma = j["noise_sigma"].get<double>();
  if (j.contains("dropout_prob"))
    c.dropout_prob = j["dropout_prob"].get<double>();
  if (j.contains("distractor_count")) {
    const auto& dc = j["distractor_count"];
    if (!dc.is_array() || dc.size() != 2)
      throw SchemaMismatch("distractor_count must be [lo, hi] in " +
                           path.string());
    c.distractor_count = IntRange{dc[0].get<int>(), dc[1].get<int>()};
  }
  if (j.contains("samples_per_scene"))
    c.samples_per_scene = j["samples_per_scene"].get<int>();
  if (j.contains("train_fraction"))
    c.train_fraction = j["train_fraction"].get<double>();
  if (j.contains("val_fraction"))
    c.val_fraction = j["val_fraction"].get<double>();
  c.validate();
  return c;
}

DetectorConfigs read_detector_configs(const std::filesystem::path& path) {
  const ordered_json j = parse_json_file(path);
  DetectorConfigs configs;
  if (j.contains("oracle")) {
    const auto& o = j["oracle"];
    if (o.contains("sigma")) configs.oracle.sigma = o["sigma"].get<double>();
    if (o.contains("drop_count"))
      configs.oracle.drop_count = o["drop_count"].get<int>();
    if (o.contains("spurious_count"))
      configs.oracle.spurious_count = o["spurious_count"].get<int>();
    if (o.contains("spurious_conf_lo"))
      configs.oracle.spurious_conf_lo = o["spurious_conf_lo"].get<double>();
    if (o.contains("spurious_conf_hi"))
      configs.oracle.spurious_conf_hi = o["spurious_conf_hi"].get<double>();
    if (o.contains("confidence_sigma_rate"))
      configs.oracle.confidence_sigma_rate =
          o["confidence_sigma_rate"].get<double>();
    configs.oracle.validate();
  }
  if (j.contains("rim")) {
    const auto& r = j["rim"];
    if (r.contains("ransac_iterations"))
      configs.rim.ransac_iterations = r["ransac_iterations"].get<int>();
    if (r.contains("inlier_threshold"))
      configs.rim.inlier_threshold = r["inlier_threshold"].get<double>();
    if (r.contains("min_inliers"))
      configs.rim.min_inliers = r["min_inliers"].get<int>();
    if (r.contains("ground_margin"))
      configs.rim.ground_margin = r["ground_margin"].get<double>();
    if (r.contains("height_hist_bin"))
      configs.rim.height_hist_bin = r["height_hist_bin"].get<double>();
    if (r.contains("max_plane_tilt_deg"))
      configs.rim.max_plane_tilt_deg = r["max_plane_tilt_deg"].get<double>();
    if (r.contains("min_hull_area"))
      configs.rim.min_hull_area = r["min_hull_area"].get<double>();
    if (r.contains("rect_method"))
      configs.rim.rect_method = r["rect_method"].get<std::string>();
    configs.rim.validate();
  }
  return configs;
}

}  // namespace binpose::io
