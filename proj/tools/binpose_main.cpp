// Command-line front end: gen | augment | detect | estimate | eval | bench.
// Exit codes: 0 success, 1 data/processing error, 2 usage error.
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "binpose/errors.hpp"
#include "binpose/io.hpp"
#include "binpose/pipeline.hpp"

namespace {

using namespace binpose;

struct CliOptions {
  int samples = 100;
  std::uint64_t seed = pipeline::kDefaultSeed;
  std::string out;
  std::string in;
  std::string detector = "oracle";
  double cp = 0.5;
  double cmin = 0.2;
  double cmax = 0.8;
  bool symmetry = false;
  int jobs = 1;
  std::string config;
};

CutoutConfig cutout_from(const CliOptions& opt) {
  CutoutConfig cfg;
  cfg.c_p = opt.cp;
  cfg.c_min = opt.cmin;
  cfg.c_max = opt.cmax;
  return cfg;
}

int run_command(const std::string& command, const CliOptions& opt) {
  if (command == "gen") {
    pipeline::GenOptions gen;
    gen.samples = opt.samples;
    gen.seed = opt.seed;
    gen.out = opt.out;
    gen.jobs = opt.jobs;
    if (!opt.config.empty()) gen.config = io::read_scene_config(opt.config);
    const auto manifest = pipeline::generate_dataset(gen);
    std::cout << "generated " << gen.samples << " samples\nmanifest: "
              << manifest.string() << "\n";
  } else if (command == "augment") {
    pipeline::AugmentOptions augment;
    augment.in_manifest = opt.in;
    augment.out = opt.out;
    augment.cutout = cutout_from(opt);
    augment.seed = opt.seed;
    augment.jobs = opt.jobs;
    const auto manifest = pipeline::augment_dataset(augment);
    std::cout << "manifest: " << manifest.string() << "\n";
  } else if (command == "detect") {
    pipeline::DetectOptions detect;
    detect.in_manifest = opt.in;
    detect.out = opt.out;
    detect.detector = opt.detector;
    detect.seed = opt.seed;
    detect.jobs = opt.jobs;
    if (!opt.config.empty())
      detect.configs = io::read_detector_configs(opt.config);
    const auto index = pipeline::run_detection(detect);
    std::cout << "predictions: " << index.string() << "\n";
  } else if (command == "estimate") {
    pipeline::EstimateOptions estimate;
    estimate.in_index = opt.in;
    estimate.out = opt.out;
    estimate.jobs = opt.jobs;
    const auto index = pipeline::run_estimation(estimate);
    std::cout << "poses: " << index.string() << "\n";
  } else if (command == "eval") {
    pipeline::EvalOptions eval;
    eval.in_index = opt.in;
    if (!opt.out.empty()) eval.out = opt.out;
    eval.symmetry_aware = opt.symmetry;
    const auto result = pipeline::run_evaluation(eval);
    std::cout << io::format_report_table(result.report, result.sample_ids);
    std::cout << "report: " << result.report_path.string() << "\n";
  } else if (command == "bench") {
    pipeline::BenchOptions bench;
    bench.samples = opt.samples;
    bench.seed = opt.seed;
    bench.out = opt.out;
    bench.cutout = cutout_from(opt);
    bench.detector = opt.detector;
    bench.symmetry_aware = opt.symmetry;
    bench.jobs = opt.jobs;
    if (!opt.config.empty()) bench.config = io::read_scene_config(opt.config);
    const auto result = pipeline::run_bench(bench);
    std::cout << io::format_report_table(result.eval.report,
                                         result.eval.sample_ids);
    std::cout << "\n" << pipeline::format_bench_table(result);
    std::cout << "timing: " << result.timing_path.string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"6DoF bin pose estimation from 3D line segments"};
  app.require_subcommand(1);

  CliOptions opt;
  std::string command;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", opt.seed, "RNG seed (default 42)");
    sub->add_option("--jobs", opt.jobs,
                    "per-sample parallelism degree (<1 = all cores)");
    sub->callback([&, sub] { command = sub->get_name(); });
    return sub;
  };

  auto* gen = add_common(app.add_subcommand("gen", "generate a synthetic dataset"));
  gen->add_option("--samples", opt.samples, "number of scans to generate");
  gen->add_option("--out", opt.out, "output directory")->required();
  gen->add_option("--config", opt.config, "scene config JSON");

  auto* augment = add_common(
      app.add_subcommand("augment", "apply cutout augmentation to a dataset"));
  augment->add_option("--in", opt.in, "input manifest.json")->required();
  augment->add_option("--out", opt.out, "output directory")->required();
  augment->add_option("--cp", opt.cp, "cutout probability");
  augment->add_option("--cmin", opt.cmin, "minimum cutout area fraction");
  augment->add_option("--cmax", opt.cmax, "maximum cutout area fraction");

  auto* detect = add_common(
      app.add_subcommand("detect", "detect rim segments on a dataset"));
  detect->add_option("--in", opt.in, "input manifest.json")->required();
  detect->add_option("--out", opt.out, "output directory")->required();
  detect->add_option("--detector", opt.detector, "oracle | rim");
  detect->add_option("--config", opt.config, "detector config JSON");

  auto* estimate = add_common(
      app.add_subcommand("estimate", "estimate poses from predictions"));
  estimate->add_option("--in", opt.in, "input predictions.json")->required();
  estimate->add_option("--out", opt.out, "output directory")->required();

  auto* eval =
      add_common(app.add_subcommand("eval", "evaluate poses against ground truth"));
  eval->add_option("--in", opt.in, "input poses.json")->required();
  eval->add_option("--out", opt.out, "report directory (default: input's)");
  eval->add_flag("--symmetry", opt.symmetry,
                 "rotation error modulo the bin's 180-degree z symmetry");

  auto* bench = add_common(
      app.add_subcommand("bench", "run the full pipeline with timing"));
  bench->add_option("--samples", opt.samples, "number of scans");
  bench->add_option("--out", opt.out, "output directory")->required();
  bench->add_option("--config", opt.config, "scene config JSON");
  bench->add_option("--detector", opt.detector, "oracle | rim");
  bench->add_option("--cp", opt.cp, "cutout probability");
  bench->add_option("--cmin", opt.cmin, "minimum cutout area fraction");
  bench->add_option("--cmax", opt.cmax, "maximum cutout area fraction");
  bench->add_flag("--symmetry", opt.symmetry, "symmetry-aware rotation error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    return run_command(command, opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
