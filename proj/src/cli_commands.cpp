#include "shiftconv/cli_commands.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "shiftconv/cae.hpp"
#include "shiftconv/classifier.hpp"
#include "shiftconv/complexity.hpp"
#include "shiftconv/conv_core.hpp"
#include "shiftconv/csv.hpp"
#include "shiftconv/errors.hpp"
#include "shiftconv/model_io.hpp"
#include "shiftconv/shift_engine.hpp"

namespace shiftconv::cli {

namespace {

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

// Per-layer activations of the naive path on a stream prefix; deeper layers
// are empty while the prefix is too short for them.
std::vector<Sequence> naive_prefix_forward(const NetworkSpec& net, const Sequence& prefix) {
  std::vector<Sequence> acts(net.depth());
  const Sequence* current = &prefix;
  for (std::size_t l = 0; l < net.depth(); ++l) {
    if (current->length() < net.layers[l].window()) break;
    acts[l] = valid_conv(net.layers[l], *current);
    current = &acts[l];
  }
  return acts;
}

bool tail_matches(const Sequence& full, const Sequence& tail) {
  if (tail.length() > full.length()) return false;
  const std::size_t offset = full.length() - tail.length();
  for (std::size_t t = 0; t < tail.length(); ++t) {
    const Frame& a = full.frames[offset + t];
    const Frame& b = tail.frames[t];
    if (a.size() != b.size()) return false;
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (!same_bits(a[j], b[j])) return false;
    }
  }
  return true;
}

void report_divergence(std::ostream& report, std::size_t step, std::size_t layer,
                       const Sequence& expected_tail, const Sequence& got_tail) {
  report << "divergence at step " << step << ", layer " << layer << "\n";
  const std::size_t n = std::min(expected_tail.length(), got_tail.length());
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t j = 0; j < expected_tail.frames[t].size() &&
                            j < got_tail.frames[t].size();
         ++j) {
      if (!same_bits(expected_tail.frames[t][j], got_tail.frames[t][j])) {
        report << "  first differing entry: frame " << t << " channel " << j << ": naive="
               << std::hexfloat << expected_tail.frames[t][j]
               << " shift=" << got_tail.frames[t][j] << std::defaultfloat << "\n";
        return;
      }
    }
  }
  report << "  retained lengths differ: naive tail " << expected_tail.length()
         << ", shift " << got_tail.length() << "\n";
}

LabeledDataset obtain_dataset(const DataOptions& data, std::uint64_t seed) {
  if (!data.dataset_path.empty()) {
    std::ifstream in(data.dataset_path);
    if (!in) throw ParseError("cannot open dataset '" + data.dataset_path + "'");
    return read_dataset_csv(in);
  }
  return synth_dataset(data.classes, data.samples_per_class, data.context, data.frames,
                       seed, data.noise);
}

const char* mode_name(TrainMode mode) {
  return mode == TrainMode::kRegular ? "regular" : "shiftnet";
}

SplitSpec parse_split_spec(const std::string& text, std::uint64_t seed) {
  SplitSpec spec;
  spec.seed = seed;
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  try {
    if (parts[0] == "holdout") {
      spec.kind = SplitSpec::Kind::kHoldOut;
      if (parts.size() > 1) spec.train_fraction = std::stod(parts[1]);
    } else if (parts[0] == "kfold") {
      spec.kind = SplitSpec::Kind::kKFold;
      if (parts.size() > 1) spec.folds = std::stoul(parts[1]);
      if (parts.size() > 2) spec.validation_fraction = std::stod(parts[2]);
    } else {
      throw ParseError("unknown split '" + parts[0] + "' (use holdout:<frac> or kfold:<k>)");
    }
  } catch (const std::logic_error&) {
    throw ParseError("malformed split spec '" + text + "'");
  }
  return spec;
}

}  // namespace

int run_verify(const VerifyOptions& options, std::ostream& report) {
  ModelFile model;
  try {
    model = load_model(options.model_path);
  } catch (const Error& e) {
    report << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const NetworkSpec& net = model.network;
  ShiftEngine engine(net, options.deepest_retained);
  Rng rng(options.seed);
  Sequence prefix;
  prefix.frames.reserve(options.steps);

  for (std::size_t step = 1; step <= options.steps; ++step) {
    Frame frame = random_frame(rng, net.input_channels());
    prefix.frames.push_back(frame);
    engine.push_frame(std::move(frame));

    const std::vector<Sequence> retained = engine.snapshot();
    const std::vector<Sequence> naive = naive_prefix_forward(net, prefix);
    if (!tail_matches(prefix, retained[0])) {
      report_divergence(report, step, 0, prefix, retained[0]);
      return kExitVerifyFailed;
    }
    for (std::size_t l = 0; l < net.depth(); ++l) {
      if (!tail_matches(naive[l], retained[l + 1])) {
        report_divergence(report, step, l + 1, naive[l], retained[l + 1]);
        return kExitVerifyFailed;
      }
    }
  }

  report << "verified: " << options.steps << " steps, " << net.depth()
         << " layers, retained activations bit-identical to the naive pass\n"
         << "shift path convolution ops: " << engine.counter().total() << "\n";
  return kExitOk;
}

int run_count(const CountOptions& options, std::ostream& out) {
  const auto rows = reconcile_grid(options.n_max, options.t_max, options.w_min, options.w_max);
  csv::write_provenance(out, 0, options.command_line);
  out << "n,t,w,series_A,closed_A,series_B,closed_B,ds,speedup,counter_A,counter_B,"
         "match_A,match_B,closed_match_A,closed_match_B\n";
  for (const ReconciliationRow& row : rows) {
    out << row.params.layers << "," << row.params.frames << "," << row.params.window << ","
        << row.series_deepest << "," << row.closed_deepest << ",";
    if (row.series_input) out << *row.series_input;
    out << "," << row.closed_input << "," << row.shift_per_step << ",";
    if (row.speedup) out << csv::format_double(*row.speedup);
    out << "," << row.counter_deepest << ",";
    if (row.counter_input) out << *row.counter_input;
    out << "," << (row.series_deepest_matches_counter ? 1 : 0) << ",";
    if (row.series_input) out << (row.series_input_matches_counter ? 1 : 0);
    out << "," << (row.closed_deepest_matches_series ? 1 : 0) << ",";
    if (row.series_input) out << (row.closed_input_matches_series ? 1 : 0);
    out << "\n";
  }
  return kExitOk;
}

int run_bench_cmd(const BenchOptions& options, std::ostream& out) {
  const auto records = run_bench(options.config);
  csv::write_provenance(out, options.config.seed, options.command_line);
  out << "mode,layers,window,context,frames,steps_per_run,runs,mean_ns_per_step,"
         "std_ns_per_step,ops_per_step,note\n";
  for (const BenchRecord& rec : records) {
    out << to_string(rec.point.mode) << "," << rec.point.layers << "," << rec.point.window
        << "," << rec.point.context << "," << rec.point.frames << ",";
    if (rec.skipped) {
      out << ",,,,," << rec.reason << "\n";
      continue;
    }
    out << rec.steps_per_run << "," << rec.runs << ","
        << csv::format_double(rec.mean_ns_per_step) << ","
        << csv::format_double(rec.std_ns_per_step) << "," << rec.ops_per_step << ",\n";
  }
  for (std::size_t context : options.config.contexts) {
    for (std::size_t window : options.config.windows) {
      for (std::size_t layers : options.config.layer_counts) {
        out << "# crossover context=" << context << " window=" << window
            << " layers=" << layers << " frames=";
        const auto cross = crossover_frames(records, context, window, layers);
        if (cross) {
          out << *cross;
        } else {
          out << "none";
        }
        out << "\n";
      }
    }
  }
  return kExitOk;
}

BenchConfig parse_bench_config(const std::string& text) {
  using nlohmann::json;
  BenchConfig config;
  try {
    const json j = json::parse(text);
    if (j.contains("context")) config.contexts = j.at("context").get<std::vector<std::size_t>>();
    if (j.contains("window")) config.windows = j.at("window").get<std::vector<std::size_t>>();
    if (j.contains("layers")) config.layer_counts = j.at("layers").get<std::vector<std::size_t>>();
    if (j.contains("frames")) config.frame_counts = j.at("frames").get<std::vector<std::size_t>>();
    if (j.contains("modes")) {
      config.modes.clear();
      for (const json& m : j.at("modes")) {
        const auto name = m.get<std::string>();
        if (name == "naive") {
          config.modes.push_back(BenchMode::kNaive);
        } else if (name == "shift") {
          config.modes.push_back(BenchMode::kShift);
        } else {
          throw ParseError("unknown bench mode '" + name + "'");
        }
      }
    }
    if (j.contains("runs")) config.runs = j.at("runs").get<int>();
    if (j.contains("warmup")) config.warmup_runs = j.at("warmup").get<int>();
    if (j.contains("steps_per_run_shift")) {
      config.steps_per_run_shift = j.at("steps_per_run_shift").get<int>();
    }
    if (j.contains("steps_per_run_naive")) {
      config.steps_per_run_naive = j.at("steps_per_run_naive").get<int>();
    }
    if (j.contains("deepest_retained")) {
      config.deepest_retained = j.at("deepest_retained").get<std::size_t>();
    }
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bench config parse failed: ") + e.what());
  }
  if (config.runs < 1 || config.warmup_runs < 0 || config.steps_per_run_shift < 1 ||
      config.steps_per_run_naive < 1) {
    throw ParseError("bench config: runs and steps_per_run must be positive");
  }
  return config;
}

BenchConfig load_bench_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open bench config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_bench_config(buf.str());
}

int run_train(const TrainOptions& options, std::ostream& out) {
  const LabeledDataset dataset = obtain_dataset(options.data, options.seed);
  validate_dataset(dataset);
  if (dataset.samples.front().length() < options.window) {
    throw InvalidInputError("samples are shorter than the encoder window");
  }

  csv::write_provenance(out, options.seed, options.command_line);
  out << "mode,epoch,loss\n";

  for (const TrainMode mode : {TrainMode::kRegular, TrainMode::kShiftNet}) {
    Rng rng(options.seed);
    CAEModel model = init_cae(rng, dataset.samples.front().context(),
                              options.hidden_channels, options.window);
    TrainConfig config;
    config.epochs = options.epochs;
    config.learning_rate = options.learning_rate;
    config.seed = options.seed;
    config.mode = mode;
    const TrainResult result = train(std::move(model), dataset.samples, config);
    for (std::size_t e = 0; e < result.loss_trace.size(); ++e) {
      out << mode_name(mode) << "," << e << "," << csv::format_double(result.loss_trace[e])
          << "\n";
    }
    out << mode_name(mode) << "," << result.loss_trace.size() << ","
        << csv::format_double(result.final_loss) << "\n";
    if (mode == TrainMode::kRegular && !options.save_model_path.empty()) {
      save_model(from_cae(result.model), options.save_model_path);
    }
  }
  return kExitOk;
}

int run_classify(const ClassifyOptions& options, std::ostream& out) {
  const TrainOptions& topt = options.train;
  const LabeledDataset dataset = obtain_dataset(topt.data, topt.seed);
  validate_dataset(dataset);
  if (dataset.num_classes < 2) {
    throw InvalidInputError("classification needs at least two classes");
  }
  if (dataset.samples.front().length() < topt.window) {
    throw InvalidInputError("samples are shorter than the encoder window");
  }
  const SplitSpec split = parse_split_spec(options.split, topt.seed);

  csv::write_provenance(out, topt.seed, topt.command_line);
  out << "# split=" << options.split << " classes=" << dataset.num_classes
      << " samples=" << dataset.samples.size() << "\n";
  out << "mode,fold,error\n";

  for (const TrainMode mode : {TrainMode::kRegular, TrainMode::kShiftNet}) {
    Rng rng(topt.seed);
    CAEModel model = init_cae(rng, dataset.samples.front().context(),
                              topt.hidden_channels, topt.window);
    TrainConfig config;
    config.epochs = topt.epochs;
    config.learning_rate = topt.learning_rate;
    config.seed = topt.seed;
    config.mode = mode;
    const TrainResult trained = train(std::move(model), dataset.samples, config);
    const Matrix features = encode_features(trained.model, dataset);
    const ClassifierResult result =
        train_classifier(features, dataset.labels, dataset.num_classes, split);
    for (std::size_t f = 0; f < result.fold_errors.size(); ++f) {
      out << mode_name(mode) << "," << f << "," << csv::format_double(result.fold_errors[f])
          << "\n";
    }
    out << mode_name(mode) << ",mean," << csv::format_double(result.error) << "\n";
  }
  return kExitOk;
}

int run_gen_data(const GenDataOptions& options, std::ostream& out) {
  const LabeledDataset dataset =
      synth_dataset(options.data.classes, options.data.samples_per_class,
                    options.data.context, options.data.frames, options.seed,
                    options.data.noise);
  csv::write_provenance(out, options.seed, options.command_line);
  write_dataset_csv(out, dataset);
  return kExitOk;
}

}  // namespace shiftconv::cli
