#include "shiftconv/cae.hpp"

#include <cmath>
#include <string>

#include "shiftconv/errors.hpp"

namespace shiftconv {

namespace {

void check_model(const CAEModel& model) {
  validate_layer(model.encoder);
  if (model.decoder_bias.size() != model.encoder.in_channels()) {
    throw InvalidInputError("decoder bias length must equal the encoder's input channels");
  }
  for (double v : model.decoder_bias) {
    if (!std::isfinite(v)) throw InvalidInputError("non-finite decoder bias entry");
  }
}

void check_input(const CAEModel& model, const Sequence& input) {
  if (!input.uniform() || input.context() != model.encoder.in_channels()) {
    throw InvalidInputError("input context does not match the encoder");
  }
  if (input.length() < model.encoder.window()) {
    throw WindowUnderflowError("input shorter than the encoder window");
  }
}

}  // namespace

CAEModel init_cae(Rng& rng, std::size_t in_channels, std::size_t hidden_channels,
                  std::size_t window, Activation act) {
  CAEModel model;
  model.encoder.activation = act;
  model.encoder.taps.reserve(window);
  for (std::size_t tau = 0; tau < window; ++tau) {
    Matrix tap(hidden_channels, in_channels);
    for (double& v : tap.data) v = rng.uniform(-0.1, 0.1);
    model.encoder.taps.push_back(std::move(tap));
  }
  model.encoder.bias.assign(hidden_channels, 0.0);
  model.decoder_bias.assign(in_channels, 0.0);
  return model;
}

Sequence encode(const CAEModel& model, const Sequence& input) {
  check_model(model);
  check_input(model, input);
  return valid_conv(model.encoder, input);
}

Sequence decode(const CAEModel& model, const Sequence& hidden) {
  check_model(model);
  return full_conv_adjoint(model.encoder, hidden, model.decoder_bias,
                           model.encoder.activation);
}

Sequence reconstruct(const CAEModel& model, const Sequence& input) {
  return decode(model, encode(model, input));
}

double reconstruction_error(const CAEModel& model, const Sequence& input) {
  const Sequence rebuilt = reconstruct(model, input);
  double err = 0.0;
  for (std::size_t s = 0; s < input.length(); ++s) {
    const Frame& a = input.frames[s];
    const Frame& b = rebuilt.frames[s];
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double d = a[j] - b[j];
      err += d * d;
    }
  }
  return err;
}

double reconstruction_error(const CAEModel& model, std::span<const Sequence> batch) {
  double err = 0.0;
  for (const Sequence& x : batch) err += reconstruction_error(model, x);
  return err;
}

CAEGradients gradients(const CAEModel& model, std::span<const Sequence> batch,
                       TrainMode mode) {
  check_model(model);
  if (batch.empty()) throw InvalidInputError("gradients: empty batch");

  const ConvLayer& enc = model.encoder;
  const std::size_t w = enc.window();
  const std::size_t cin = enc.in_channels();
  const std::size_t cout = enc.out_channels();

  CAEGradients grad;
  grad.taps.assign(w, Matrix(cout, cin));
  grad.bias.assign(cout, 0.0);
  grad.decoder_bias.assign(cin, 0.0);

  for (const Sequence& x : batch) {
    check_input(model, x);
    const std::size_t th = x.length() - w + 1;
    const std::size_t tx = x.length();

    const Sequence hidden = valid_conv(enc, x);
    const Sequence rebuilt =
        full_conv_adjoint(enc, hidden, model.decoder_bias, enc.activation);

    // d(error)/d(reconstruction pre-activation)
    std::vector<Frame> g_recon(tx, Frame(cin, 0.0));
    for (std::size_t s = 0; s < tx; ++s) {
      for (std::size_t j = 0; j < cin; ++j) {
        const double y = rebuilt.frames[s][j];
        g_recon[s][j] = 2.0 * (y - x.frames[s][j]) *
                        activation_derivative(enc.activation, y);
        grad.decoder_bias[j] += g_recon[s][j];
      }
    }

    // Decode side: reconstruction frame s receives tap tau applied to hidden
    // frame s - tau, so the weight picks up hidden[k] (x) g_recon[k + tau].
    for (std::size_t tau = 0; tau < w; ++tau) {
      Matrix& g_tap = grad.taps[tau];
      for (std::size_t k = 0; k < th; ++k) {
        const Frame& h = hidden.frames[k];
        const Frame& g = g_recon[k + tau];
        for (std::size_t i = 0; i < cout; ++i) {
          for (std::size_t j = 0; j < cin; ++j) {
            g_tap(i, j) += h[i] * g[j];
          }
        }
      }
    }

    // Encode side. In ShiftNet mode every hidden frame except the newest is a
    // cached copy shifted in from earlier steps: a constant with respect to
    // the parameters, so nothing flows back through it.
    const std::size_t first_live = mode == TrainMode::kShiftNet ? th - 1 : 0;
    Frame g_hidden(cout);
    for (std::size_t k = first_live; k < th; ++k) {
      for (std::size_t i = 0; i < cout; ++i) {
        double acc = 0.0;
        for (std::size_t tau = 0; tau < w; ++tau) {
          const Matrix& tap = enc.taps[tau];
          const Frame& g = g_recon[k + tau];
          for (std::size_t j = 0; j < cin; ++j) {
            acc += tap(i, j) * g[j];
          }
        }
        g_hidden[i] = acc * activation_derivative(enc.activation, hidden.frames[k][i]);
        grad.bias[i] += g_hidden[i];
      }
      for (std::size_t tau = 0; tau < w; ++tau) {
        Matrix& g_tap = grad.taps[tau];
        const Frame& xin = x.frames[k + tau];
        for (std::size_t i = 0; i < cout; ++i) {
          for (std::size_t j = 0; j < cin; ++j) {
            g_tap(i, j) += g_hidden[i] * xin[j];
          }
        }
      }
    }
  }
  return grad;
}

TrainResult train(CAEModel model, std::span<const Sequence> data,
                  const TrainConfig& config) {
  check_model(model);
  if (config.epochs < 1) throw InvalidInputError("train: epochs must be >= 1");
  if (!(config.learning_rate >= 0.0)) {
    throw InvalidInputError("train: learning rate must be non-negative");
  }
  if (data.empty()) throw InvalidInputError("train: empty dataset");

  TrainResult result;
  result.loss_trace.reserve(config.epochs);
  const std::size_t w = model.encoder.window();
  const std::size_t cin = model.encoder.in_channels();
  const std::size_t cout = model.encoder.out_channels();

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double loss = reconstruction_error(model, data);
    if (!std::isfinite(loss)) {
      throw TrainingDivergedError("loss not finite at epoch " + std::to_string(epoch), epoch);
    }
    result.loss_trace.push_back(loss);

    const CAEGradients grad = gradients(model, data, config.mode);
    const double lr = config.learning_rate;
    for (std::size_t tau = 0; tau < w; ++tau) {
      Matrix& tap = model.encoder.taps[tau];
      const Matrix& g = grad.taps[tau];
      for (std::size_t e = 0; e < tap.data.size(); ++e) tap.data[e] -= lr * g.data[e];
    }
    for (std::size_t i = 0; i < cout; ++i) model.encoder.bias[i] -= lr * grad.bias[i];
    for (std::size_t j = 0; j < cin; ++j) model.decoder_bias[j] -= lr * grad.decoder_bias[j];
  }

  result.final_loss = reconstruction_error(model, data);
  if (!std::isfinite(result.final_loss)) {
    throw TrainingDivergedError("loss not finite after final update", config.epochs);
  }
  result.model = std::move(model);
  return result;
}

void validate_dataset(const LabeledDataset& dataset) {
  if (dataset.samples.empty()) throw InvalidInputError("dataset has no samples");
  if (dataset.samples.size() != dataset.labels.size()) {
    throw InvalidInputError("dataset sample/label count mismatch");
  }
  if (dataset.num_classes < 1) throw InvalidInputError("dataset needs at least one class");
  const std::size_t t = dataset.samples.front().length();
  const std::size_t c = dataset.samples.front().context();
  for (const Sequence& s : dataset.samples) {
    if (s.length() != t || s.context() != c || !s.uniform()) {
      throw InvalidInputError("dataset samples must share one geometry");
    }
  }
  for (std::size_t label : dataset.labels) {
    if (label >= dataset.num_classes) throw InvalidInputError("label out of range");
  }
}

LabeledDataset synth_dataset(std::size_t classes, std::size_t samples_per_class,
                             std::size_t context, std::size_t frames,
                             std::uint64_t seed, double noise_amplitude) {
  if (classes < 1 || samples_per_class < 1 || context < 1 || frames < 1) {
    throw InvalidInputError("synth_dataset: all counts must be >= 1");
  }
  Rng rng(seed);

  // Class signatures: two sinusoid components with distinct frequencies,
  // random phases, and a per-channel phase gradient.
  struct ClassShape {
    double f1, f2, phase1, phase2, chan1, chan2;
  };
  std::vector<ClassShape> shapes(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    ClassShape& s = shapes[c];
    s.f1 = 1.0 + 0.6 * static_cast<double>(c);
    s.f2 = 2.0 + 0.45 * static_cast<double>((c * 3) % classes);
    s.phase1 = rng.uniform(0.0, 6.283185307179586);
    s.phase2 = rng.uniform(0.0, 6.283185307179586);
    s.chan1 = rng.uniform(0.3, 1.2);
    s.chan2 = rng.uniform(0.3, 1.2);
  }

  constexpr double kTwoPi = 6.283185307179586476925286766559;
  constexpr double kAmplitude = 0.35;

  LabeledDataset out;
  out.num_classes = classes;
  out.samples.reserve(classes * samples_per_class);
  out.labels.reserve(classes * samples_per_class);
  for (std::size_t c = 0; c < classes; ++c) {
    const ClassShape& s = shapes[c];
    for (std::size_t n = 0; n < samples_per_class; ++n) {
      Sequence sample;
      sample.frames.reserve(frames);
      for (std::size_t i = 0; i < frames; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(frames);
        Frame f(context);
        for (std::size_t ch = 0; ch < context; ++ch) {
          const double v1 = std::sin(kTwoPi * s.f1 * u + s.phase1 + s.chan1 * ch);
          const double v2 = std::sin(kTwoPi * s.f2 * u + s.phase2 + s.chan2 * ch);
          double v = kAmplitude * (v1 + v2);
          if (noise_amplitude > 0.0) v += noise_amplitude * rng.gaussian();
          f[ch] = v;
        }
        sample.frames.push_back(std::move(f));
      }
      out.samples.push_back(std::move(sample));
      out.labels.push_back(c);
    }
  }
  return out;
}

Matrix encode_features(const CAEModel& model, const LabeledDataset& dataset) {
  validate_dataset(dataset);
  const Sequence first = encode(model, dataset.samples.front());
  const std::size_t dim = first.length() * first.context();
  Matrix features(dataset.samples.size(), dim);
  for (std::size_t s = 0; s < dataset.samples.size(); ++s) {
    const Sequence hidden = encode(model, dataset.samples[s]);
    std::size_t col = 0;
    for (const Frame& f : hidden.frames) {
      for (double v : f) features(s, col++) = v;
    }
  }
  return features;
}

}  // namespace shiftconv
