#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace shiftconv {

enum class BenchMode { kNaive, kShift };

const char* to_string(BenchMode mode);

// One sweep point: an n-layer stack, all windows `window`, all channel sizes
// `context`, evaluated over a stream where each step advances the input by
// one frame. Naive mode re-runs the full forward pass on the current
// `frames`-long window per step; shift mode pushes one frame into a warmed
// engine.
struct BenchPoint {
  BenchMode mode = BenchMode::kNaive;
  std::size_t layers = 2;
  std::size_t window = 10;
  std::size_t context = 40;
  std::size_t frames = 40;  // t_x
};

struct BenchConfig {
  std::vector<std::size_t> contexts{40};
  std::vector<std::size_t> windows{10};
  std::vector<std::size_t> layer_counts{2};
  std::vector<std::size_t> frame_counts{20, 50, 100, 200, 350, 500};
  std::vector<BenchMode> modes{BenchMode::kNaive, BenchMode::kShift};
  int runs = 10;          // timed runs per point
  int warmup_runs = 3;    // discarded
  int steps_per_run_shift = 64;
  int steps_per_run_naive = 1;
  std::size_t deepest_retained = 16;
  std::uint64_t seed = 1;
};

struct BenchRecord {
  BenchPoint point;
  bool skipped = false;
  std::string reason;
  double mean_ns_per_step = 0.0;
  double std_ns_per_step = 0.0;
  std::uint64_t ops_per_step = 0;
  int runs = 0;
  int steps_per_run = 0;
};

// Times one sweep point on a monotonic clock: warm-up runs discarded, then
// `runs` timed runs of steps_per_run steps each. Stream data is generated
// outside the timed region. Infeasible geometry yields a skipped record.
BenchRecord run_bench_point(const BenchPoint& point, const BenchConfig& config);

// Cross product of the config axes.
std::vector<BenchRecord> run_bench(const BenchConfig& config);

// Smallest frame count at which shift mode's mean step time beats naive
// mode's, for one (context, window, layers) cell of the sweep.
std::optional<std::size_t> crossover_frames(std::span<const BenchRecord> records,
                                            std::size_t context, std::size_t window,
                                            std::size_t layers);

}  // namespace shiftconv
