#pragma once

#include <span>
#include <vector>

#include "shiftconv/rng.hpp"
#include "shiftconv/types.hpp"

namespace shiftconv {

// Single-frame kernel shared by the naive and streaming evaluation paths.
// Computes activation(sum over taps of W_tap * window[tap] + bias) for one
// output frame. The accumulation order is fixed -- tap index ascending, then
// input channel ascending, bias added last -- so two calls on identical inputs
// return bit-identical frames. Records one operation on `counter` when given.
//
// `window` must hold exactly layer.window() frames of layer.in_channels()
// entries each; anything else throws InvalidInputError.
Frame conv_frame(const ConvLayer& layer, std::span<const Frame* const> window,
                 OpCounter* counter = nullptr, std::size_t layer_index = 0);
Frame conv_frame(const ConvLayer& layer, std::span<const Frame> window,
                 OpCounter* counter = nullptr, std::size_t layer_index = 0);

// Valid convolution: output frame t is conv_frame over input frames
// t .. t+w-1, so the output has input.length() - w + 1 frames.
// Throws WindowUnderflowError when the input is shorter than the window.
Sequence valid_conv(const ConvLayer& layer, const Sequence& input,
                    OpCounter* counter = nullptr, std::size_t layer_index = 0);

// Full convolution with the transposed taps: the linear part is the exact
// adjoint of valid_conv's linear part, mapping hidden.length() frames to
// hidden.length() + w - 1 frames. `output_bias` (length in_channels, empty
// meaning zero) and `activation` are applied after the adjoint sum.
Sequence full_conv_adjoint(const ConvLayer& layer, const Sequence& hidden,
                           std::span<const double> output_bias,
                           Activation activation);
// Convenience: zero output bias, the layer's own activation.
Sequence full_conv_adjoint(const ConvLayer& layer, const Sequence& hidden);

// Naive full forward pass: layer l is valid_conv over layer l-1's output.
// Returns every layer's activations, shallowest first.
std::vector<Sequence> forward_stack(const NetworkSpec& net, const Sequence& input,
                                    OpCounter& counter);

// Seeded constructions used by the harness and tests.
ConvLayer random_layer(Rng& rng, std::size_t window, std::size_t in_channels,
                       std::size_t out_channels,
                       Activation act = Activation::kTanh, double scale = 0.5);
// windows.size() == n, channels.size() == n + 1 (input context first).
NetworkSpec random_network(Rng& rng, std::span<const std::size_t> windows,
                           std::span<const std::size_t> channels,
                           Activation act = Activation::kTanh, double scale = 0.5);
Frame random_frame(Rng& rng, std::size_t context, double amplitude = 1.0);
Sequence random_sequence(Rng& rng, std::size_t length, std::size_t context,
                         double amplitude = 1.0);

}  // namespace shiftconv
