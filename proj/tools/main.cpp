#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "shiftconv/cli_commands.hpp"
#include "shiftconv/errors.hpp"
#include "shiftconv/version.hpp"

namespace {

std::string join_command_line(int argc, char** argv) {
  std::string cmd;
  for (int i = 0; i < argc; ++i) {
    if (i) cmd += ' ';
    const std::string arg = argv[i];
    if (arg.find(' ') != std::string::npos) {
      cmd += '\'' + arg + '\'';
    } else {
      cmd += arg;
    }
  }
  return cmd;
}

// Runs `fn(stream)` against stdout or --out.
template <typename Fn>
int with_output(const std::string& out_path, Fn&& fn) {
  if (out_path.empty()) return fn(std::cout);
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "error: cannot write '" << out_path << "'\n";
    return shiftconv::cli::kExitUsage;
  }
  return fn(out);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace shiftconv;

  CLI::App app{"streaming 1D temporal-convolution engine with cached-activation shifting"};
  app.set_version_flag("--version", std::string("shiftconv ") + kVersion);
  app.require_subcommand(1);
  const std::string command_line = join_command_line(argc, argv);

  // verify
  auto* verify = app.add_subcommand(
      "verify", "stream seeded frames through both evaluation paths and compare bit-exactly");
  cli::VerifyOptions verify_opts;
  verify->add_option("--model", verify_opts.model_path, "model file (JSON)")->required();
  verify->add_option("--seed", verify_opts.seed, "stream seed");
  verify->add_option("--steps", verify_opts.steps, "frames to stream");
  verify->add_option("--retain", verify_opts.deepest_retained, "deepest frames to retain");

  // bench
  auto* bench = app.add_subcommand("bench", "time naive vs shift per-step cost over a sweep");
  cli::BenchOptions bench_opts;
  std::string bench_config_path;
  std::string bench_out;
  bench->add_option("--config", bench_config_path, "sweep config (JSON)");
  bench->add_option("--out", bench_out, "write CSV here instead of stdout");

  // count
  auto* count = app.add_subcommand("count", "operation-count reconciliation report");
  cli::CountOptions count_opts;
  std::string count_out;
  count->add_option("--n-max", count_opts.n_max, "max layer count");
  count->add_option("--t-max", count_opts.t_max, "max time-axis anchor");
  count->add_option("--w-min", count_opts.w_min, "min window");
  count->add_option("--w-max", count_opts.w_max, "max window");
  count->add_option("--out", count_out, "write CSV here instead of stdout");

  // shared train/classify options
  auto add_train_options = [](CLI::App* cmd, cli::TrainOptions& opts) {
    cmd->add_option("--data", opts.data.dataset_path, "dataset CSV (default: synthetic)");
    cmd->add_option("--classes", opts.data.classes, "synthetic class count");
    cmd->add_option("--per-class", opts.data.samples_per_class, "synthetic samples per class");
    cmd->add_option("--context", opts.data.context, "synthetic context size");
    cmd->add_option("--frames", opts.data.frames, "synthetic frames per sample");
    cmd->add_option("--noise", opts.data.noise, "synthetic noise amplitude");
    cmd->add_option("--window", opts.window, "encoder window");
    cmd->add_option("--hidden", opts.hidden_channels, "hidden channels");
    cmd->add_option("--epochs", opts.epochs, "training epochs");
    cmd->add_option("--lr", opts.learning_rate, "learning rate");
    cmd->add_option("--seed", opts.seed, "seed");
  };

  auto* train = app.add_subcommand("train", "train the auto-encoder in both modes, emit loss traces");
  cli::TrainOptions train_opts;
  std::string train_out;
  add_train_options(train, train_opts);
  train->add_option("--save-model", train_opts.save_model_path, "write the regular-mode model here");
  train->add_option("--out", train_out, "write CSV here instead of stdout");

  auto* classify = app.add_subcommand("classify", "full pipeline: auto-encoder, features, MLP error rates");
  cli::ClassifyOptions classify_opts;
  std::string classify_out;
  add_train_options(classify, classify_opts.train);
  classify->add_option("--split", classify_opts.split, "holdout:<frac> or kfold:<k>[:<val frac>]");
  classify->add_option("--out", classify_out, "write CSV here instead of stdout");

  auto* gen = app.add_subcommand("gen-data", "emit a synthetic labeled dataset as CSV");
  cli::GenDataOptions gen_opts;
  std::string gen_out;
  gen->add_option("--classes", gen_opts.data.classes, "class count");
  gen->add_option("--per-class", gen_opts.data.samples_per_class, "samples per class");
  gen->add_option("--context", gen_opts.data.context, "context size");
  gen->add_option("--frames", gen_opts.data.frames, "frames per sample");
  gen->add_option("--noise", gen_opts.data.noise, "noise amplitude");
  gen->add_option("--seed", gen_opts.seed, "seed");
  gen->add_option("--out", gen_out, "write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitUsage;
  }

  try {
    if (verify->parsed()) {
      return cli::run_verify(verify_opts, std::cout);
    }
    if (bench->parsed()) {
      bench_opts.command_line = command_line;
      if (!bench_config_path.empty()) {
        bench_opts.config = cli::load_bench_config(bench_config_path);
      }
      return with_output(bench_out,
                         [&](std::ostream& out) { return cli::run_bench_cmd(bench_opts, out); });
    }
    if (count->parsed()) {
      count_opts.command_line = command_line;
      return with_output(count_out,
                         [&](std::ostream& out) { return cli::run_count(count_opts, out); });
    }
    if (train->parsed()) {
      train_opts.command_line = command_line;
      return with_output(train_out,
                         [&](std::ostream& out) { return cli::run_train(train_opts, out); });
    }
    if (classify->parsed()) {
      classify_opts.train.command_line = command_line;
      return with_output(classify_out, [&](std::ostream& out) {
        return cli::run_classify(classify_opts, out);
      });
    }
    if (gen->parsed()) {
      gen_opts.command_line = command_line;
      return with_output(gen_out,
                         [&](std::ostream& out) { return cli::run_gen_data(gen_opts, out); });
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitUsage;
  }
  return cli::kExitUsage;
}
