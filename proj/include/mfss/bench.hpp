#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mfss/io.hpp"
#include "mfss/synth.hpp"

namespace mfss {

/// Timing grid. Every (n, n_q, p) combination gets one synthetic instance
/// with T rows and the ragged-edge recipe; each backend is timed on it.
struct BenchConfig {
  std::vector<Index> n{10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 110, 120};
  std::vector<Index> n_q{1};
  std::vector<Index> p{6};
  std::vector<Backend> backends{Backend::Baseline, Backend::Blocked, Backend::Adaptive};
  Index T = 500;
  int reps = 20;
  int warmup = 3;
  double radius = 0.95;
  MissingRecipe recipe = MissingRecipe::Bracket;
  std::uint64_t seed = 1;
};

BenchConfig bench_config(const Config& cfg);

struct BenchCell {
  Index n = 0;
  Index n_q = 0;
  Index p = 0;
  Backend backend = Backend::Adaptive;
  double ms_per_iter = 0.0;
  int reps = 0;
};

/// Median wall time in milliseconds of `body` over `reps` calls after
/// `warmup` untimed calls. The argument is the call index.
double median_ms(const std::function<void(int)>& body, int reps, int warmup);

/// Times one draw (smoothing of a pre-generated pseudo-sample plus the
/// final assembly) per repetition. Single-threaded.
std::vector<BenchCell> run_bench(const BenchConfig& cfg,
                                 const std::function<void(const BenchCell&)>& progress = {});

/// "# key: value" lines describing the host.
std::vector<std::string> machine_info();

void write_bench_csv(std::ostream& os, const std::vector<BenchCell>& cells, const BenchConfig& cfg);
/// Per (n, n_q, p): ms of each backend divided by the baseline ms.
void write_relative_csv(std::ostream& os, const std::vector<BenchCell>& cells);

}  // namespace mfss
