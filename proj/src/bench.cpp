#include "shiftconv/bench.hpp"

#include <chrono>
#include <cmath>

#include "shiftconv/conv_core.hpp"
#include "shiftconv/errors.hpp"
#include "shiftconv/shift_engine.hpp"

namespace shiftconv {

const char* to_string(BenchMode mode) {
  return mode == BenchMode::kNaive ? "naive" : "shift";
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ns(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::nano>(b - a).count();
}

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
};

Stats mean_std(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) {
    const double d = x - s.mean;
    var += d * d;
  }
  s.stddev = std::sqrt(var / static_cast<double>(xs.size()));
  return s;
}

}  // namespace

BenchRecord run_bench_point(const BenchPoint& point, const BenchConfig& config) {
  BenchRecord rec;
  rec.point = point;
  if (point.layers < 1 || point.window < 1 || point.context < 1 ||
      point.frames < point.layers * (point.window - 1) + 1) {
    rec.skipped = true;
    rec.reason = "infeasible";
    return rec;
  }

  const int reps = point.mode == BenchMode::kShift ? config.steps_per_run_shift
                                                   : config.steps_per_run_naive;
  const int total_runs = config.warmup_runs + config.runs;
  rec.runs = config.runs;
  rec.steps_per_run = reps;

  Rng rng(config.seed);
  const std::vector<std::size_t> windows(point.layers, point.window);
  const std::vector<std::size_t> channels(point.layers + 1, point.context);
  NetworkSpec net = random_network(rng, windows, channels);

  std::vector<double> per_step_ns;
  per_step_ns.reserve(config.runs);
  double checksum = 0.0;

  if (point.mode == BenchMode::kShift) {
    ShiftEngine engine(std::move(net), config.deepest_retained);
    // All stream data comes from outside the timed region.
    const std::size_t total_steps =
        point.frames + 1 + static_cast<std::size_t>(total_runs) * reps;
    std::vector<Frame> stream;
    stream.reserve(total_steps);
    for (std::size_t i = 0; i < total_steps; ++i) {
      stream.push_back(random_frame(rng, point.context));
    }
    std::size_t cursor = 0;
    // Warm to steady state: after `frames` pushes every input buffer is full.
    for (std::size_t i = 0; i < point.frames; ++i) {
      engine.push_frame(std::move(stream[cursor++]));
    }
    const std::uint64_t ops_before = engine.counter().total();
    engine.push_frame(std::move(stream[cursor++]));
    rec.ops_per_step = engine.counter().total() - ops_before;

    for (int run = 0; run < total_runs; ++run) {
      const auto t0 = Clock::now();
      for (int r = 0; r < reps; ++r) {
        engine.push_frame(std::move(stream[cursor++]));
      }
      const auto t1 = Clock::now();
      if (run >= config.warmup_runs) {
        per_step_ns.push_back(elapsed_ns(t0, t1) / reps);
      }
    }
    const auto tail = engine.snapshot().back();
    if (!tail.frames.empty()) checksum += tail.frames.back().front();
  } else {
    // Naive: every step re-runs the full forward pass on the current
    // `frames`-long window of the stream.
    const std::size_t total_steps = static_cast<std::size_t>(total_runs) * reps;
    const Sequence stream =
        random_sequence(rng, point.frames + total_steps + 1, point.context);

    OpCounter ops;
    Sequence window;
    window.frames.assign(stream.frames.begin(), stream.frames.begin() + point.frames);
    forward_stack(net, window, ops);
    rec.ops_per_step = ops.total();

    std::size_t offset = 1;
    std::vector<Sequence> windows_block(reps);
    for (int run = 0; run < total_runs; ++run) {
      // Window construction (pure data movement) stays outside the timer.
      for (int r = 0; r < reps; ++r) {
        windows_block[r].frames.assign(stream.frames.begin() + offset,
                                       stream.frames.begin() + offset + point.frames);
        ++offset;
      }
      OpCounter scratch;
      const auto t0 = Clock::now();
      for (int r = 0; r < reps; ++r) {
        const auto acts = forward_stack(net, windows_block[r], scratch);
        checksum += acts.back().frames.back().front();
      }
      const auto t1 = Clock::now();
      if (run >= config.warmup_runs) {
        per_step_ns.push_back(elapsed_ns(t0, t1) / reps);
      }
    }
  }

  (void)checksum;
  const Stats stats = mean_std(per_step_ns);
  rec.mean_ns_per_step = stats.mean;
  rec.std_ns_per_step = stats.stddev;
  return rec;
}

std::vector<BenchRecord> run_bench(const BenchConfig& config) {
  std::vector<BenchRecord> records;
  for (std::size_t context : config.contexts) {
    for (std::size_t window : config.windows) {
      for (std::size_t layers : config.layer_counts) {
        for (std::size_t frames : config.frame_counts) {
          for (BenchMode mode : config.modes) {
            records.push_back(
                run_bench_point(BenchPoint{mode, layers, window, context, frames}, config));
          }
        }
      }
    }
  }
  return records;
}

std::optional<std::size_t> crossover_frames(std::span<const BenchRecord> records,
                                            std::size_t context, std::size_t window,
                                            std::size_t layers) {
  std::optional<std::size_t> best;
  for (const BenchRecord& shift_rec : records) {
    if (shift_rec.skipped || shift_rec.point.mode != BenchMode::kShift) continue;
    if (shift_rec.point.context != context || shift_rec.point.window != window ||
        shift_rec.point.layers != layers) {
      continue;
    }
    for (const BenchRecord& naive_rec : records) {
      if (naive_rec.skipped || naive_rec.point.mode != BenchMode::kNaive) continue;
      if (naive_rec.point.context != context || naive_rec.point.window != window ||
          naive_rec.point.layers != layers ||
          naive_rec.point.frames != shift_rec.point.frames) {
        continue;
      }
      if (shift_rec.mean_ns_per_step < naive_rec.mean_ns_per_step) {
        if (!best || shift_rec.point.frames < *best) best = shift_rec.point.frames;
      }
    }
  }
  return best;
}

}  // namespace shiftconv
