#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "shiftconv/bench.hpp"

namespace shiftconv::cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

struct VerifyOptions {
  std::string model_path;
  std::uint64_t seed = 0;
  std::size_t steps = 200;
  std::size_t deepest_retained = 8;
};

// Streams seeded frames through the shifting engine and the naive full-window
// forward pass; exits 0 only when every retained activation is bit-identical
// at every step. The first divergence (if any) is reported.
int run_verify(const VerifyOptions& options, std::ostream& report);

struct CountOptions {
  std::size_t n_max = 4;
  std::size_t t_max = 8;
  std::size_t w_min = 1;
  std::size_t w_max = 4;
  std::string command_line;
};

// Operation-count reconciliation CSV over the (n, t, w) grid.
int run_count(const CountOptions& options, std::ostream& out);

struct BenchOptions {
  BenchConfig config;
  std::string command_line;
};

int run_bench_cmd(const BenchOptions& options, std::ostream& out);

// JSON sweep description; missing keys keep their defaults.
BenchConfig load_bench_config(const std::string& path);
BenchConfig parse_bench_config(const std::string& text);

struct DataOptions {
  std::string dataset_path;  // empty: use the synthetic generator
  std::size_t classes = 10;
  std::size_t samples_per_class = 50;
  std::size_t context = 8;
  std::size_t frames = 20;
  double noise = 0.05;
};

struct TrainOptions {
  DataOptions data;
  std::size_t window = 5;
  std::size_t hidden_channels = 6;
  std::size_t epochs = 100;
  double learning_rate = 1e-4;
  std::uint64_t seed = 1;
  std::string save_model_path;  // optional; regular-mode model
  std::string command_line;
};

// Trains the auto-encoder in both connectivity modes and emits per-epoch loss
// traces as CSV.
int run_train(const TrainOptions& options, std::ostream& out);

struct ClassifyOptions {
  TrainOptions train;
  std::string split = "holdout:0.6";  // or kfold:<k>[:<val fraction>]
};

// Full pipeline: auto-encoder per mode, feature extraction, MLP classifier,
// error rates per split as CSV.
int run_classify(const ClassifyOptions& options, std::ostream& out);

struct GenDataOptions {
  DataOptions data;
  std::uint64_t seed = 1;
  std::string command_line;
};

int run_gen_data(const GenDataOptions& options, std::ostream& out);

}  // namespace shiftconv::cli
