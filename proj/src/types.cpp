#include "shiftconv/types.hpp"

#include <cmath>

#include "shiftconv/errors.hpp"

namespace shiftconv {

bool Sequence::uniform() const noexcept {
  const std::size_t c = context();
  for (const Frame& f : frames) {
    if (f.size() != c) return false;
  }
  return true;
}

Sequence Sequence::zeros(std::size_t length, std::size_t context) {
  Sequence s;
  s.frames.assign(length, Frame(context, 0.0));
  return s;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double activate(Activation act, double pre) {
  return act == Activation::kTanh ? std::tanh(pre) : pre;
}

double activation_derivative(Activation act, double activated) {
  return act == Activation::kTanh ? 1.0 - activated * activated : 1.0;
}

const char* to_string(Activation act) {
  return act == Activation::kTanh ? "tanh" : "identity";
}

void validate_layer(const ConvLayer& layer) {
  if (layer.taps.empty()) {
    throw InvalidInputError("layer needs at least one weight tap");
  }
  const std::size_t rows = layer.taps.front().rows;
  const std::size_t cols = layer.taps.front().cols;
  if (rows == 0 || cols == 0) {
    throw InvalidInputError("weight matrices must be non-empty");
  }
  for (const Matrix& tap : layer.taps) {
    if (tap.rows != rows || tap.cols != cols) {
      throw InvalidInputError("all taps of a layer must share one shape");
    }
    if (tap.data.size() != tap.rows * tap.cols) {
      throw InvalidInputError("weight storage does not match its shape");
    }
    for (double v : tap.data) {
      if (!std::isfinite(v)) throw InvalidInputError("non-finite weight entry");
    }
  }
  if (layer.bias.size() != rows) {
    throw InvalidInputError("bias length must equal the output channel count");
  }
  for (double v : layer.bias) {
    if (!std::isfinite(v)) throw InvalidInputError("non-finite bias entry");
  }
}

void validate_network(const NetworkSpec& net) {
  if (net.layers.empty()) {
    throw InvalidInputError("network needs at least one layer");
  }
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    validate_layer(net.layers[l]);
    if (l > 0 && net.layers[l].in_channels() != net.layers[l - 1].out_channels()) {
      throw InvalidInputError("adjacent layers do not chain: output channels of layer " +
                              std::to_string(l - 1) + " differ from input channels of layer " +
                              std::to_string(l));
    }
  }
}

bool same_geometry(const NetworkSpec& a, const NetworkSpec& b) {
  if (a.depth() != b.depth()) return false;
  for (std::size_t l = 0; l < a.depth(); ++l) {
    const ConvLayer& x = a.layers[l];
    const ConvLayer& y = b.layers[l];
    if (x.window() != y.window() || x.in_channels() != y.in_channels() ||
        x.out_channels() != y.out_channels()) {
      return false;
    }
  }
  return true;
}

std::size_t cumulative_shrink(const NetworkSpec& net, std::size_t layer) {
  std::size_t shrink = 0;
  for (std::size_t j = 0; j <= layer && j < net.depth(); ++j) {
    shrink += net.layers[j].window() - 1;
  }
  return shrink;
}

std::size_t layer_output_length(const NetworkSpec& net, std::size_t layer,
                                std::size_t input_length) {
  const std::size_t shrink = cumulative_shrink(net, layer);
  return input_length > shrink ? input_length - shrink : 0;
}

std::size_t first_emission_step(const NetworkSpec& net, std::size_t layer) {
  return cumulative_shrink(net, layer) + 1;
}

void OpCounter::record(std::size_t layer_index) {
  if (layer_index >= per_layer_.size()) per_layer_.resize(layer_index + 1, 0);
  ++per_layer_[layer_index];
}

std::uint64_t OpCounter::layer_total(std::size_t layer_index) const {
  return layer_index < per_layer_.size() ? per_layer_[layer_index] : 0;
}

std::uint64_t OpCounter::total() const {
  std::uint64_t sum = 0;
  for (std::uint64_t c : per_layer_) sum += c;
  return sum;
}

}  // namespace shiftconv
