// SPDX-License-Identifier: Apache-2.0
#include "sardet/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

#include "sardet/parallel.hpp"
#include "sardet/rng.hpp"

namespace sardet {

std::int64_t required_fps(double prf_lines_per_s, double samples_per_line, int crop) {
  if (!(prf_lines_per_s > 0.0) || !(samples_per_line > 0.0))
    throw param_error("required_fps: rates must be > 0");
  if (crop <= 0) throw param_error("required_fps: crop must be > 0");
  double crops_per_s =
      prf_lines_per_s * samples_per_line / (static_cast<double>(crop) * crop);
  return static_cast<std::int64_t>(std::ceil(crops_per_s - 1e-9));
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Generic engine: forward(t, batch) runs one batch for worker t.
template <typename Forward>
BenchReport run_bench(int crop, const std::string& desc, const BenchOptions& opt,
                      Forward&& forward) {
  if (opt.duration_s < 1.0) throw param_error("bench: duration must be >= 1 s");
  if (opt.runs < 5) throw param_error("bench: at least 5 runs required");
  if (opt.threads < 1) throw param_error("bench: threads must be >= 1");

  BenchReport report;
  report.threads = opt.threads;
  report.crop = crop;
  report.batch = opt.batch;
  report.fps_required = required_fps(opt.prf, opt.samples_per_line, crop);
  report.model_desc = desc;

  // Worker-private inputs, generated before any timing starts.
  auto setup_t0 = Clock::now();
  std::vector<Tensor4> inputs;
  Rng rng(opt.seed);
  for (int t = 0; t < opt.threads; ++t) {
    Tensor4 batch(opt.batch, Model::kInputChannels, crop, crop);
    for (auto& v : batch.data) v = static_cast<float>(rng.gaussian());
    inputs.push_back(std::move(batch));
  }
  // The layer-level pool would contend with the bench's own workers.
  auto& pool = ThreadPool::instance();
  const int saved_threads = pool.threads();
  pool.set_threads(1);
  for (int t = 0; t < opt.threads; ++t) forward(t, inputs[t]);  // warmup
  report.setup_seconds = seconds_since(setup_t0);

  const double per_run = opt.duration_s / opt.runs;
  auto measured_t0 = Clock::now();
  for (int run = 0; run < opt.runs; ++run) {
    std::atomic<std::int64_t> crops{0};
    auto t0 = Clock::now();
    auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                             std::chrono::duration<double>(per_run));
    std::vector<std::thread> workers;
    for (int t = 0; t < opt.threads; ++t) {
      workers.emplace_back([&, t] {
        std::int64_t mine = 0;
        while (Clock::now() < deadline) {
          forward(t, inputs[t]);
          mine += opt.batch;
        }
        crops.fetch_add(mine);
      });
    }
    for (auto& w : workers) w.join();
    double elapsed = seconds_since(t0);
    report.run_fps.push_back(static_cast<double>(crops.load()) / elapsed);
  }
  report.measured_seconds = seconds_since(measured_t0);
  pool.set_threads(saved_threads);

  double mean = 0.0;
  for (double f : report.run_fps) mean += f;
  mean /= static_cast<double>(report.run_fps.size());
  double var = 0.0;
  for (double f : report.run_fps) var += (f - mean) * (f - mean);
  var /= static_cast<double>(report.run_fps.size());
  report.fps_mean = mean;
  report.fps_std = std::sqrt(var);
  report.pass = report.fps_mean >= static_cast<double>(report.fps_required);
  return report;
}

}  // namespace

BenchReport bench_model(Model& model, const BenchOptions& options) {
  if (!model.bn_stats_ready()) {
    // Random-weight models can still be benched; give BN usable stats.
    Tensor4 warm(1, Model::kInputChannels, model.config().crop, model.config().crop);
    model.forward(warm, Mode::train);
  }
  std::string desc = std::string("float32 ") + model.config().size_tag;
  return run_bench(model.config().crop, desc, options,
                   [&](int, const Tensor4& batch) { model.forward(batch, Mode::eval); });
}

BenchReport bench_model(const QuantizedModel& model, const BenchOptions& options) {
  std::string desc = std::string("int8 ") + model.config.size_tag;
  return run_bench(model.config.crop, desc, options,
                   [&](int, const Tensor4& batch) { model.forward(batch); });
}

std::string bench_report_text(const BenchReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "model = %s\ncrop = %d\nthreads = %d\nbatch = %d\n"
                "fps_required = %lld\nfps_measured_mean = %.1f\nfps_measured_std = %.1f\n"
                "runs = %zu\nrealtime_pass = %s\n",
                r.model_desc.c_str(), r.crop, r.threads, r.batch,
                static_cast<long long>(r.fps_required), r.fps_mean, r.fps_std, r.run_fps.size(),
                r.pass ? "true" : "false");
  return buf;
}

std::string bench_csv_header() {
  return "model,crop,threads,batch,fps_required,fps_mean,fps_std,pass";
}

std::string bench_csv_row(const BenchReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s,%d,%d,%d,%lld,%.2f,%.2f,%d", r.model_desc.c_str(), r.crop,
                r.threads, r.batch, static_cast<long long>(r.fps_required), r.fps_mean, r.fps_std,
                r.pass ? 1 : 0);
  return buf;
}

}  // namespace sardet
