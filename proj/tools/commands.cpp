// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "inference.hpp"
#include "sardet/bench.hpp"
#include "sardet/parallel.hpp"
#include "suite.hpp"
#include "trainer.hpp"

namespace fs = std::filesystem;

namespace sardet::cli {

namespace {

struct Common {
  std::string config_path;
  std::int64_t seed = -1;
  std::string out;
  int threads = 1;
  bool force = false;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config, bool needs_out) {
  auto* cfg = cmd->add_option("--config", c.config_path, "Experiment config file");
  if (needs_config) cfg->required();
  cmd->add_option("--seed", c.seed, "Override the config seed");
  auto* out = cmd->add_option("--out", c.out, "Output directory or file");
  if (needs_out) out->required();
  cmd->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--force", c.force, "Overwrite existing outputs");
}

KeyValueConfig load_config(const Common& c) {
  return KeyValueConfig::from_file(c.config_path);
}

void print_counts(const std::string& split, const SuiteCounts& n) {
  std::printf("%s: scenes %d crops %d ships %d windmills %d truncated_echoes %d", split.c_str(),
              n.scenes, n.crops, n.ships, n.windmills, n.truncated);
  if (n.dropped_by_offset > 0) std::printf(" labels_dropped_by_offset %d", n.dropped_by_offset);
  std::printf("\n");
}

int cmd_simulate(const Common& c) {
  KeyValueConfig cfg = load_config(c);
  SuiteSpec spec = SuiteSpec::from_config(cfg);
  if (c.seed >= 0) spec.seed = static_cast<std::uint64_t>(c.seed);
  if (fs::exists(c.out) && !fs::is_empty(c.out) && !c.force)
    throw param_error("output directory " + c.out + " exists; pass --force to overwrite");
  fs::create_directories(c.out);

  print_counts("train", build_split(spec, 0, spec.scenes_train, c.out + "/train"));
  print_counts("val", build_split(spec, 1000, spec.scenes_val, c.out + "/val"));
  print_counts("test", build_split(spec, 2000, spec.scenes_test, c.out + "/test"));

  KeyValueConfig resolved = cfg;
  resolved.set("simulate.seed", std::to_string(spec.seed));
  std::ofstream snapshot(fs::path(c.out) / "simulate_config.txt", std::ios::trunc);
  snapshot << resolved.serialize();
  return 0;
}

int cmd_train(const Common& c, const std::string& data_root, const std::string& resume) {
  ThreadPool::instance().set_threads(c.threads);
  KeyValueConfig cfg = load_config(c);
  TrainSpec spec = TrainSpec::from_config(cfg);
  std::vector<std::uint64_t> seeds = spec.seeds;
  if (c.seed >= 0) seeds = {static_cast<std::uint64_t>(c.seed)};

  Dataset train_set = read_dataset(data_root + "/train");
  Dataset val_set = read_dataset(data_root + "/val");
  fs::create_directories(c.out);

  std::vector<double> f1s;
  for (auto seed : seeds) {
    std::string ckpt = c.out + "/ckpt_s" + std::to_string(seed) + ".sdcp";
    if (fs::exists(ckpt) && !c.force && resume.empty())
      throw param_error("checkpoint " + ckpt + " exists; pass --force to retrain");
    TrainOutcome out = train_one_seed(spec, seed, train_set, &val_set, ckpt, std::cout, resume);
    if (out.val_f1 >= 0.0) f1s.push_back(out.val_f1);
    std::printf("checkpoint %s threshold %.2f\n", ckpt.c_str(), out.threshold);
  }
  if (f1s.size() > 1) {
    double mean = 0.0;
    for (double f : f1s) mean += f;
    mean /= static_cast<double>(f1s.size());
    double var = 0.0;
    for (double f : f1s) var += (f - mean) * (f - mean);
    var /= static_cast<double>(f1s.size());
    std::printf("val_f1_30 %.2f +/- %.2f over %zu seeds\n", mean, std::sqrt(var), f1s.size());
  }
  return 0;
}

ForwardFn forward_of(Model& m) {
  return [&m](const Tensor4& b) { return m.forward(b, Mode::eval); };
}

ForwardFn forward_of(const QuantizedModel& m) {
  return [&m](const Tensor4& b) { return m.forward(b); };
}

void apply_near_shore_filter(std::map<int, SceneResult>& scenes, int exclude_cols) {
  if (exclude_cols <= 0) return;
  for (auto& [id, scene] : scenes) {
    std::vector<Detection> d;
    for (const auto& det : scene.detections)
      if (det.x >= static_cast<float>(exclude_cols)) d.push_back(det);
    scene.detections = std::move(d);
    std::vector<SceneLabel> l;
    for (const auto& label : scene.labels)
      if (label.x >= static_cast<float>(exclude_cols)) l.push_back(label);
    scene.labels = std::move(l);
  }
}

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  bool quantized = false;
  double threshold = -1.0;
  std::string csv;
  std::string detections;
  int exclude_cols = 0;
};

int cmd_eval(const Common& c, const EvalArgs& a) {
  ThreadPool::instance().set_threads(c.threads);
  Dataset ds = read_dataset(a.data);
  if (ds.crops.empty()) throw param_error("eval: dataset " + a.data + " is empty");

  std::optional<Model> model;
  std::optional<QuantizedModel> qmodel;
  ForwardFn forward;
  double threshold = a.threshold;
  int n_classes = 0;
  int crop = 0;
  if (a.quantized) {
    qmodel.emplace(QuantizedModel::load(a.checkpoint));
    forward = forward_of(*qmodel);
    if (threshold < 0.0 && qmodel->meta.has_threshold()) threshold = qmodel->meta.threshold;
    n_classes = qmodel->config.n_classes;
    crop = qmodel->config.crop;
  } else {
    model.emplace(load_checkpoint(a.checkpoint));
    forward = forward_of(*model);
    if (threshold < 0.0 && model->meta.has_threshold()) threshold = model->meta.threshold;
    n_classes = model->config().n_classes;
    crop = model->config().crop;
  }
  if (threshold < 0.0)
    throw param_error("eval: checkpoint has no stored threshold; pass --threshold");
  if (ds.n_classes != n_classes)
    throw param_error("eval: dataset has n_classes " + std::to_string(ds.n_classes) +
                      ", model expects " + std::to_string(n_classes));
  if (ds.crops.front().image.height != crop)
    throw param_error("eval: dataset crop " + std::to_string(ds.crops.front().image.height) +
                      ", model expects " + std::to_string(crop));

  auto scenes = infer_scenes(forward, ds, std::min(threshold, 1.0), 16);
  if (threshold > 1.0)
    for (auto& [id, s] : scenes) s.detections.clear();
  apply_near_shore_filter(scenes, a.exclude_cols);
  EvalSummary summary = summarize(scenes, n_classes);
  std::printf("%s", report_text(summary.overall).c_str());
  std::printf("threshold = %.2f\nscenes = %zu\n", threshold, scenes.size());

  if (!a.csv.empty()) {
    std::ofstream csv(a.csv, std::ios::trunc);
    csv << report_csv_header() << "\n";
    for (const auto& [id, r] : summary.per_scene)
      csv << report_csv_row(std::to_string(id), r) << "\n";
  }
  if (!a.detections.empty()) write_detections(scenes, a.detections);
  return 0;
}

struct QuantizeArgs {
  std::string checkpoint;
  std::string calib_data;
  std::string eval_data;
  int calib_crops = 64;
};

int cmd_quantize(const Common& c, const QuantizeArgs& a) {
  ThreadPool::instance().set_threads(c.threads);
  Model model = load_checkpoint(a.checkpoint);
  Dataset calib = read_dataset(a.calib_data);
  if (calib.crops.empty()) throw param_error("quantize: empty calibration dataset");

  std::vector<int> order;
  for (int i = 0; i < static_cast<int>(calib.crops.size()) && i < a.calib_crops; ++i)
    order.push_back(i);
  std::vector<Tensor4> batches;
  for (int first = 0; first < static_cast<int>(order.size()); first += 8)
    batches.push_back(crops_to_batch(calib.crops, order,
                                     first,
                                     std::min(8, static_cast<int>(order.size()) - first)));

  FoldedModel folded(model);
  Calibration cal = calibrate(folded, batches);
  for (const auto& w : cal.warnings) std::printf("warning: %s\n", w.c_str());
  QuantizedModel qmodel(folded, cal);
  qmodel.save(c.out);
  std::printf("quantized checkpoint %s (calibrated on %zu crops)\n", c.out.c_str(), order.size());

  if (!a.eval_data.empty()) {
    Dataset ds = read_dataset(a.eval_data);
    double threshold = model.meta.has_threshold() ? model.meta.threshold : 0.5;
    auto fwd_f = [&](const Tensor4& b) { return model.forward(b, Mode::eval); };
    auto fwd_q = [&](const Tensor4& b) { return qmodel.forward(b); };
    double f1_float = summarize(infer_scenes(fwd_f, ds, threshold), ds.n_classes).overall.f1_30;
    double f1_int8 = summarize(infer_scenes(fwd_q, ds, threshold), ds.n_classes).overall.f1_30;
    std::printf("f1_30 float %.4f int8 %.4f delta %+.4f\n", f1_float, f1_int8,
                f1_int8 - f1_float);
  }
  return 0;
}

struct BenchArgs {
  std::string checkpoint;
  bool quantized = false;
  double duration = 5.0;
  int runs = 5;
  int batch = 8;
  std::string csv;
  std::string thread_sweep;  // e.g. "1,2,4"
  double prf = 1664.0;
  double samples_per_line = 19950.0;
};

void append_csv(const std::string& path, const BenchReport& r) {
  bool fresh = !fs::exists(path);
  std::ofstream csv(path, std::ios::app);
  if (fresh) csv << bench_csv_header() << "\n";
  csv << bench_csv_row(r) << "\n";
}

int cmd_bench(const Common& c, const BenchArgs& a) {
  BenchOptions opt;
  opt.threads = c.threads;
  opt.duration_s = a.duration;
  opt.runs = a.runs;
  opt.batch = a.batch;
  opt.prf = a.prf;
  opt.samples_per_line = a.samples_per_line;
  if (c.seed >= 0) opt.seed = static_cast<std::uint64_t>(c.seed);

  std::vector<int> thread_counts{c.threads};
  if (!a.thread_sweep.empty()) {
    thread_counts.clear();
    for (const auto& part : split(a.thread_sweep, ',')) thread_counts.push_back(std::stoi(part));
  }

  for (int threads : thread_counts) {
    opt.threads = threads;
    BenchReport report;
    if (a.quantized) {
      QuantizedModel q = QuantizedModel::load(a.checkpoint);
      report = bench_model(q, opt);
    } else {
      Model m = load_checkpoint(a.checkpoint);
      if (!m.meta.has_threshold() && m.meta.epochs == 0)
        std::printf("warning: benchmarking an untrained checkpoint\n");
      report = bench_model(m, opt);
    }
    std::printf("%s", bench_report_text(report).c_str());
    if (!a.csv.empty()) append_csv(a.csv, report);
  }
  return 0;
}

struct SweepArgs {
  std::string data_root;
};

int cmd_sweep(const Common& c, const SweepArgs& a) {
  ThreadPool::instance().set_threads(c.threads);
  KeyValueConfig cfg = load_config(c);
  TrainSpec base = TrainSpec::from_config(cfg);
  std::string cells = cfg.get_string("sweep.cells", "S:128,S:256,M:256");
  fs::create_directories(c.out);

  std::ofstream csv(fs::path(c.out) / "sweep.csv", std::ios::trunc);
  csv << "size,crop,seed,f1_30,ship_f1_30,windmill_f1_30\n";

  for (const auto& cell : split(cells, ',')) {
    auto parts = split(cell, ':');
    if (parts.size() != 2) throw param_error("sweep: cell must look like S:128, got " + cell);
    TrainSpec spec = base;
    spec.size_tag = parts[0][0];
    spec.crop = std::stoi(parts[1]);

    std::string data_dir = a.data_root + "/crop" + parts[1];
    Dataset train_set = read_dataset(data_dir + "/train");
    Dataset val_set = read_dataset(data_dir + "/val");
    Dataset test_set = read_dataset(data_dir + "/test");

    std::vector<double> f1s;
    for (auto seed : spec.seeds) {
      std::string ckpt = c.out + "/ckpt_" + parts[0] + parts[1] + "_s" + std::to_string(seed) +
                         ".sdcp";
      TrainOutcome out = train_one_seed(spec, seed, train_set, &val_set, ckpt, std::cout);
      Model model = load_checkpoint(ckpt);
      auto fwd = [&](const Tensor4& b) { return model.forward(b, Mode::eval); };
      EvalSummary summary =
          summarize(infer_scenes(fwd, test_set, out.threshold, spec.batch), test_set.n_classes);
      const auto& o = summary.overall;
      char row[160];
      std::snprintf(row, sizeof(row), "%s,%d,%llu,%.4f,%.4f,%.4f", parts[0].c_str(), spec.crop,
                    static_cast<unsigned long long>(seed), o.f1_30,
                    o.ship_f1 ? *o.ship_f1 : -1.0, o.windmill_f1 ? *o.windmill_f1 : -1.0);
      csv << row << "\n";
      csv.flush();
      std::printf("cell %s seed %llu test f1_30 %.4f\n", cell.c_str(),
                  static_cast<unsigned long long>(seed), o.f1_30);
      f1s.push_back(o.f1_30);
    }
    double mean = 0.0;
    for (double f : f1s) mean += f;
    mean /= static_cast<double>(f1s.size());
    double var = 0.0;
    for (double f : f1s) var += (f - mean) * (f - mean);
    var /= static_cast<double>(f1s.size());
    std::printf("cell %s f1_30 %.2f +/- %.2f\n", cell.c_str(), mean, std::sqrt(var));
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Ship detection on unfocused SAR data: simulation, training, evaluation, "
               "int8 quantization and throughput benchmarking"};
  app.require_subcommand(1);

  Common c_sim, c_train, c_eval, c_quant, c_bench, c_sweep;
  std::string train_data, train_resume;
  EvalArgs eval_args;
  QuantizeArgs quant_args;
  BenchArgs bench_args;
  SweepArgs sweep_args;

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic scene suite");
  add_common(sim, c_sim, true, true);

  auto* train = app.add_subcommand("train", "Train one checkpoint per seed");
  add_common(train, c_train, true, true);
  train->add_option("--data", train_data, "Dataset root (train/ and val/)")->required();
  train->add_option("--resume", train_resume, "Checkpoint to continue from");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  add_common(eval, c_eval, false, false);
  eval->add_option("--checkpoint", eval_args.checkpoint, "Checkpoint path")->required();
  eval->add_option("--data", eval_args.data, "Dataset directory")->required();
  eval->add_flag("--quantized", eval_args.quantized, "Checkpoint is an int8 SDQ8 file");
  eval->add_option("--threshold", eval_args.threshold, "Override the stored threshold");
  eval->add_option("--csv", eval_args.csv, "Write per-scene scores CSV");
  eval->add_option("--detections", eval_args.detections, "Write detections text file");
  eval->add_option("--exclude-cols", eval_args.exclude_cols,
                   "Drop labels/detections with x below this column (near-shore filter)");

  auto* quant = app.add_subcommand("quantize", "Post-training int8 quantization");
  add_common(quant, c_quant, false, true);
  quant->add_option("--checkpoint", quant_args.checkpoint, "Float checkpoint")->required();
  quant->add_option("--data", quant_args.calib_data, "Calibration dataset")->required();
  quant->add_option("--eval-data", quant_args.eval_data, "Report float-vs-int8 parity on this set");
  quant->add_option("--calib-crops", quant_args.calib_crops, "Calibration crop budget");

  auto* bench = app.add_subcommand("bench", "Forward-pass throughput benchmark");
  add_common(bench, c_bench, false, false);
  bench->add_option("--checkpoint", bench_args.checkpoint, "Checkpoint path")->required();
  bench->add_flag("--quantized", bench_args.quantized, "Checkpoint is an int8 SDQ8 file");
  bench->add_option("--duration", bench_args.duration, "Total measured seconds (>= 1)");
  bench->add_option("--runs", bench_args.runs, "Timed runs (>= 5)");
  bench->add_option("--batch", bench_args.batch, "Crops per forward");
  bench->add_option("--csv", bench_args.csv, "Append rows to this CSV");
  bench->add_option("--thread-sweep", bench_args.thread_sweep, "Comma list, e.g. 1,2,4");
  bench->add_option("--prf", bench_args.prf, "Acquisition lines per second");
  bench->add_option("--samples-per-line", bench_args.samples_per_line, "Samples per line");

  auto* sweep = app.add_subcommand("sweep", "Model-size x crop-size study");
  add_common(sweep, c_sweep, true, true);
  sweep->add_option("--data-root", sweep_args.data_root, "Root with crop<N>/ datasets")
      ->required();

  std::vector<const char*> argv;
  argv.push_back("sardet");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(c_sim);
    if (train->parsed()) return cmd_train(c_train, train_data, train_resume);
    if (eval->parsed()) return cmd_eval(c_eval, eval_args);
    if (quant->parsed()) return cmd_quantize(c_quant, quant_args);
    if (bench->parsed()) return cmd_bench(c_bench, bench_args);
    if (sweep->parsed()) return cmd_sweep(c_sweep, sweep_args);
  } catch (const param_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const shape_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const state_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const format_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
  return 1;
}

}  // namespace sardet::cli
