#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace shiftconv {

// One time slice: a real vector along the context axis.
using Frame = std::vector<double>;

// Ordered frames along the time axis. Every frame must share one context size;
// operations validate this where it matters.
struct Sequence {
  std::vector<Frame> frames;

  std::size_t length() const noexcept { return frames.size(); }
  std::size_t context() const noexcept {
    return frames.empty() ? 0 : frames.front().size();
  }
  bool uniform() const noexcept;

  static Sequence zeros(std::size_t length, std::size_t context);
};

// Dense row-major matrix, just enough for weight taps and feature tables.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  static Matrix identity(std::size_t n);
};

enum class Activation { kTanh, kIdentity };

double activate(Activation act, double pre);
// Derivative expressed through the activated value y = act(pre):
// tanh' = 1 - y^2, identity' = 1.
double activation_derivative(Activation act, double activated);
const char* to_string(Activation act);

// One temporal convolution layer: window-many weight matrices (each
// out_channels x in_channels), a bias per output channel, and an activation.
struct ConvLayer {
  std::vector<Matrix> taps;
  std::vector<double> bias;
  Activation activation = Activation::kTanh;

  std::size_t window() const noexcept { return taps.size(); }
  std::size_t in_channels() const noexcept {
    return taps.empty() ? 0 : taps.front().cols;
  }
  std::size_t out_channels() const noexcept {
    return taps.empty() ? 0 : taps.front().rows;
  }
};

// Throws InvalidInputError unless all taps share one shape, the bias length
// matches, and every entry is finite.
void validate_layer(const ConvLayer& layer);

// Stacked layers, shallowest first. Adjacent layers must chain:
// layer k's out_channels equal layer k+1's in_channels.
struct NetworkSpec {
  std::vector<ConvLayer> layers;

  std::size_t depth() const noexcept { return layers.size(); }
  std::size_t input_channels() const noexcept {
    return layers.empty() ? 0 : layers.front().in_channels();
  }
  std::size_t output_channels() const noexcept {
    return layers.empty() ? 0 : layers.back().out_channels();
  }
};

void validate_network(const NetworkSpec& net);

// True when the two networks have identical layer geometry (windows and
// channel sizes); weights and activations may differ.
bool same_geometry(const NetworkSpec& a, const NetworkSpec& b);

// Frames layer `layer` drops relative to the input: sum of (w-1) up to and
// including that layer.
std::size_t cumulative_shrink(const NetworkSpec& net, std::size_t layer);

// Output length of layer `layer` for `input_length` input frames
// (0 while the stack is still warming up).
std::size_t layer_output_length(const NetworkSpec& net, std::size_t layer,
                                std::size_t input_length);

// 1-based index of the push at which layer `layer` emits its first frame.
std::size_t first_emission_step(const NetworkSpec& net, std::size_t layer);

// Tally of convolution operations; the unit is one output time-frame computed
// in one layer. Counts only grow (reset() starts a new tally).
class OpCounter {
 public:
  void record(std::size_t layer_index);
  std::uint64_t layer_total(std::size_t layer_index) const;
  std::uint64_t total() const;
  const std::vector<std::uint64_t>& per_layer() const noexcept { return per_layer_; }
  void reset() { per_layer_.clear(); }

 private:
  std::vector<std::uint64_t> per_layer_;
};

}  // namespace shiftconv
