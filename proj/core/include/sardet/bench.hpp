// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sardet/model.hpp"
#include "sardet/quantize.hpp"

namespace sardet {

/// Crops per second needed to keep up with the acquisition stream:
/// ceil(prf * samples_per_line / crop^2).
std::int64_t required_fps(double prf_lines_per_s, double samples_per_line, int crop);

struct BenchReport {
  double fps_mean = 0.0;
  double fps_std = 0.0;
  std::vector<double> run_fps;  // one entry per timed run (>= 5)
  int threads = 1;
  int crop = 0;
  int batch = 1;
  std::int64_t fps_required = 0;
  bool pass = false;
  double setup_seconds = 0.0;     // input generation, excluded from runs
  double measured_seconds = 0.0;  // total timed window
  std::string model_desc;
};

struct BenchOptions {
  int threads = 1;
  double duration_s = 5.0;  // total, split across runs; >= 1
  int runs = 5;
  int batch = 8;
  double prf = 1664.0;
  double samples_per_line = 19950.0;
  std::uint64_t seed = 7;
};

/// Steady-state forward throughput over random crops. Measures the
/// model forward only: inputs are generated before the clock starts and
/// decode/NMS never run. Each worker thread owns its inputs and runs
/// independent forwards; the model is shared immutable state.
BenchReport bench_model(Model& model, const BenchOptions& options);
BenchReport bench_model(const QuantizedModel& model, const BenchOptions& options);

std::string bench_report_text(const BenchReport& r);
std::string bench_csv_header();
std::string bench_csv_row(const BenchReport& r);

}  // namespace sardet
