#include "shiftconv/conv_core.hpp"

#include <string>

#include "shiftconv/errors.hpp"

namespace shiftconv {

Frame conv_frame(const ConvLayer& layer, std::span<const Frame* const> window,
                 OpCounter* counter, std::size_t layer_index) {
  const std::size_t w = layer.window();
  const std::size_t cin = layer.in_channels();
  const std::size_t cout = layer.out_channels();
  if (window.size() != w) {
    throw InvalidInputError("conv_frame: window holds " + std::to_string(window.size()) +
                            " frames, layer expects " + std::to_string(w));
  }
  for (const Frame* f : window) {
    if (f == nullptr || f->size() != cin) {
      throw InvalidInputError("conv_frame: window frame length does not match input channels");
    }
  }

  Frame out(cout);
  for (std::size_t i = 0; i < cout; ++i) {
    double acc = 0.0;
    for (std::size_t tau = 0; tau < w; ++tau) {
      const double* row = layer.taps[tau].data.data() + i * cin;
      const double* x = window[tau]->data();
      for (std::size_t j = 0; j < cin; ++j) {
        acc += row[j] * x[j];
      }
    }
    acc += layer.bias[i];
    out[i] = activate(layer.activation, acc);
  }
  if (counter != nullptr) counter->record(layer_index);
  return out;
}

Frame conv_frame(const ConvLayer& layer, std::span<const Frame> window,
                 OpCounter* counter, std::size_t layer_index) {
  std::vector<const Frame*> ptrs(window.size());
  for (std::size_t i = 0; i < window.size(); ++i) ptrs[i] = &window[i];
  return conv_frame(layer, std::span<const Frame* const>(ptrs), counter, layer_index);
}

Sequence valid_conv(const ConvLayer& layer, const Sequence& input,
                    OpCounter* counter, std::size_t layer_index) {
  const std::size_t w = layer.window();
  if (w == 0) throw InvalidInputError("valid_conv: layer has no taps");
  if (input.length() < w) {
    throw WindowUnderflowError("valid_conv: input has " + std::to_string(input.length()) +
                               " frames, window needs " + std::to_string(w));
  }
  const std::size_t out_len = input.length() - w + 1;
  Sequence out;
  out.frames.reserve(out_len);
  std::vector<const Frame*> window(w);
  for (std::size_t t = 0; t < out_len; ++t) {
    for (std::size_t tau = 0; tau < w; ++tau) window[tau] = &input.frames[t + tau];
    out.frames.push_back(
        conv_frame(layer, std::span<const Frame* const>(window), counter, layer_index));
  }
  return out;
}

Sequence full_conv_adjoint(const ConvLayer& layer, const Sequence& hidden,
                           std::span<const double> output_bias,
                           Activation activation) {
  const std::size_t w = layer.window();
  const std::size_t cin = layer.in_channels();
  const std::size_t cout = layer.out_channels();
  if (w == 0) throw InvalidInputError("full_conv_adjoint: layer has no taps");
  if (hidden.length() == 0) {
    throw InvalidInputError("full_conv_adjoint: need at least one hidden frame");
  }
  for (const Frame& f : hidden.frames) {
    if (f.size() != cout) {
      throw InvalidInputError("full_conv_adjoint: hidden frame length does not match output channels");
    }
  }
  if (!output_bias.empty() && output_bias.size() != cin) {
    throw InvalidInputError("full_conv_adjoint: output bias length does not match input channels");
  }

  const std::size_t th = hidden.length();
  const std::size_t tx = th + w - 1;
  Sequence out;
  out.frames.assign(tx, Frame(cin, 0.0));
  for (std::size_t s = 0; s < tx; ++s) {
    Frame& dst = out.frames[s];
    for (std::size_t j = 0; j < cin; ++j) {
      double acc = 0.0;
      for (std::size_t tau = 0; tau < w; ++tau) {
        if (tau > s) break;
        const std::size_t k = s - tau;
        if (k >= th) continue;
        const Matrix& tap = layer.taps[tau];
        const double* h = hidden.frames[k].data();
        for (std::size_t i = 0; i < cout; ++i) {
          acc += tap(i, j) * h[i];
        }
      }
      if (!output_bias.empty()) acc += output_bias[j];
      dst[j] = activate(activation, acc);
    }
  }
  return out;
}

Sequence full_conv_adjoint(const ConvLayer& layer, const Sequence& hidden) {
  return full_conv_adjoint(layer, hidden, {}, layer.activation);
}

std::vector<Sequence> forward_stack(const NetworkSpec& net, const Sequence& input,
                                    OpCounter& counter) {
  validate_network(net);
  std::vector<Sequence> activations;
  activations.reserve(net.depth());
  const Sequence* current = &input;
  for (std::size_t l = 0; l < net.depth(); ++l) {
    activations.push_back(valid_conv(net.layers[l], *current, &counter, l));
    current = &activations.back();
  }
  return activations;
}

ConvLayer random_layer(Rng& rng, std::size_t window, std::size_t in_channels,
                       std::size_t out_channels, Activation act, double scale) {
  ConvLayer layer;
  layer.activation = act;
  layer.taps.reserve(window);
  for (std::size_t tau = 0; tau < window; ++tau) {
    Matrix tap(out_channels, in_channels);
    for (double& v : tap.data) v = rng.uniform(-scale, scale);
    layer.taps.push_back(std::move(tap));
  }
  layer.bias.resize(out_channels);
  for (double& v : layer.bias) v = rng.uniform(-scale, scale);
  return layer;
}

NetworkSpec random_network(Rng& rng, std::span<const std::size_t> windows,
                           std::span<const std::size_t> channels, Activation act,
                           double scale) {
  if (channels.size() != windows.size() + 1) {
    throw InvalidInputError("random_network: need one channel size per layer boundary");
  }
  NetworkSpec net;
  net.layers.reserve(windows.size());
  for (std::size_t l = 0; l < windows.size(); ++l) {
    net.layers.push_back(random_layer(rng, windows[l], channels[l], channels[l + 1], act, scale));
  }
  return net;
}

Frame random_frame(Rng& rng, std::size_t context, double amplitude) {
  Frame f(context);
  for (double& v : f) v = rng.uniform(-amplitude, amplitude);
  return f;
}

Sequence random_sequence(Rng& rng, std::size_t length, std::size_t context,
                         double amplitude) {
  Sequence s;
  s.frames.reserve(length);
  for (std::size_t t = 0; t < length; ++t) s.frames.push_back(random_frame(rng, context, amplitude));
  return s;
}

}  // namespace shiftconv
