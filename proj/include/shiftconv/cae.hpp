#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "shiftconv/conv_core.hpp"
#include "shiftconv/rng.hpp"
#include "shiftconv/types.hpp"

namespace shiftconv {

// Convolutional auto-encoder with tied weights: encode by valid convolution,
// decode by the exact adjoint (full convolution with transposed taps) plus a
// separate reconstruction bias, both followed by the layer's activation.
struct CAEModel {
  ConvLayer encoder;
  std::vector<double> decoder_bias;  // length encoder.in_channels()
};

enum class TrainMode { kRegular, kShiftNet };

struct TrainConfig {
  std::size_t epochs = 100;
  double learning_rate = 1e-4;
  std::uint64_t seed = 0;
  TrainMode mode = TrainMode::kRegular;
};

// Weights uniform on [-0.1, 0.1]; both biases start at zero.
CAEModel init_cae(Rng& rng, std::size_t in_channels, std::size_t hidden_channels,
                  std::size_t window, Activation act = Activation::kTanh);

Sequence encode(const CAEModel& model, const Sequence& input);
Sequence decode(const CAEModel& model, const Sequence& hidden);
Sequence reconstruct(const CAEModel& model, const Sequence& input);

// Squared reconstruction error summed over frames and channels.
double reconstruction_error(const CAEModel& model, const Sequence& input);
double reconstruction_error(const CAEModel& model, std::span<const Sequence> batch);

struct CAEGradients {
  std::vector<Matrix> taps;          // dE/dW, one per tap
  std::vector<double> bias;          // dE/db (encoder)
  std::vector<double> decoder_bias;  // dE/dc
};

// Gradient of the batch reconstruction error with respect to all parameters.
//
// Regular mode backpropagates through the whole encode/decode pair. ShiftNet
// mode matches the streaming evaluator's connectivity: only the newest hidden
// frame is a function of the parameters; every earlier hidden frame is a
// cached value carried over from previous steps, so it contributes to the
// decode-side gradient as data but passes nothing back to the encoder. The
// two modes coincide when the hidden layer has a single frame.
CAEGradients gradients(const CAEModel& model, std::span<const Sequence> batch,
                       TrainMode mode);

struct TrainResult {
  CAEModel model;
  // loss_trace[e] is the batch error before update e; loss_trace[0] is the
  // initial error.
  std::vector<double> loss_trace;
  double final_loss = 0.0;
};

// Full-batch gradient descent. Deterministic given the model and data; throws
// TrainingDivergedError (with the epoch index) if the loss stops being finite.
TrainResult train(CAEModel model, std::span<const Sequence> data,
                  const TrainConfig& config);

// Fixed-geometry labeled samples.
struct LabeledDataset {
  std::vector<Sequence> samples;
  std::vector<std::size_t> labels;
  std::size_t num_classes = 0;
};

void validate_dataset(const LabeledDataset& dataset);

// Synthetic stand-in for recorded corpora: every class is a distinct mixture
// of two sinusoids (class-specific frequencies and phases, per-channel phase
// gradient) plus seeded gaussian noise.
LabeledDataset synth_dataset(std::size_t classes, std::size_t samples_per_class,
                             std::size_t context, std::size_t frames,
                             std::uint64_t seed, double noise_amplitude = 0.05);

// Per-sample flattened hidden activations (frames concatenated in time
// order), one row per sample.
Matrix encode_features(const CAEModel& model, const LabeledDataset& dataset);

}  // namespace shiftconv
