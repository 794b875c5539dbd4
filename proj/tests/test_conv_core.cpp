#include <bit>
#include <cmath>
#include <cstdint>

#include <doctest.h>

#include "oracles.hpp"
#include "shiftconv/conv_core.hpp"
#include "shiftconv/errors.hpp"

using namespace shiftconv;

namespace {

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool same_bits(const Sequence& a, const Sequence& b) {
  if (a.length() != b.length()) return false;
  for (std::size_t t = 0; t < a.length(); ++t) {
    if (a.frames[t].size() != b.frames[t].size()) return false;
    for (std::size_t j = 0; j < a.frames[t].size(); ++j) {
      if (!same_bits(a.frames[t][j], b.frames[t][j])) return false;
    }
  }
  return true;
}

ConvLayer identity_layer(std::size_t channels) {
  ConvLayer layer;
  layer.taps.push_back(Matrix::identity(channels));
  layer.bias.assign(channels, 0.0);
  layer.activation = Activation::kIdentity;
  return layer;
}

}  // namespace

TEST_CASE("conv_frame: zero weights reduce to tanh of the bias") {
  ConvLayer layer;
  layer.taps.assign(3, Matrix(2, 4));
  layer.bias = {0.25, -1.5};
  layer.activation = Activation::kTanh;

  Rng rng(7);
  const Sequence window = random_sequence(rng, 3, 4);
  const Frame out = conv_frame(layer, std::span<const Frame>(window.frames));
  REQUIRE(out.size() == 2);
  CHECK(out[0] == std::tanh(0.25));
  CHECK(out[1] == std::tanh(-1.5));
}

TEST_CASE("conv_frame: w=1 identity layer passes the frame through") {
  const ConvLayer layer = identity_layer(3);
  const Frame input{0.5, -2.0, 3.25};
  const Frame out = conv_frame(layer, std::span<const Frame>(&input, 1));
  CHECK(out == input);
}

TEST_CASE("conv_frame: seeded random case matches the frozen oracle values") {
  Rng rng(2024);
  const ConvLayer layer = random_layer(rng, 2, 2, 3, Activation::kTanh, 0.5);
  const Sequence window = random_sequence(rng, 2, 2, 1.0);

  // Frozen from the scalar oracle (tests/oracles.hpp) before the kernel ran.
  const Frame expected{0x1.2ecbdf14689eap-1, 0x1.e94e57e808412p-3,
                       0x1.edd69a88775e8p-4};
  const Frame live_oracle = oracle::conv_frame_ref(layer, window, 0);
  const Frame out = conv_frame(layer, std::span<const Frame>(window.frames));
  REQUIRE(out.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(same_bits(out[i], expected[i]));
    CHECK(same_bits(live_oracle[i], expected[i]));
  }
}

TEST_CASE("conv_frame: counter records one op for the layer") {
  Rng rng(5);
  const ConvLayer layer = random_layer(rng, 3, 2, 2);
  const Sequence window = random_sequence(rng, 3, 2);
  OpCounter counter;
  conv_frame(layer, std::span<const Frame>(window.frames), &counter, 4);
  CHECK(counter.total() == 1);
  CHECK(counter.layer_total(4) == 1);
  CHECK(counter.layer_total(0) == 0);
}

TEST_CASE("conv_frame: shape mismatch raises invalid input") {
  Rng rng(5);
  const ConvLayer layer = random_layer(rng, 2, 3, 2);
  const Sequence bad = random_sequence(rng, 2, 4);  // wrong context
  CHECK_THROWS_AS(conv_frame(layer, std::span<const Frame>(bad.frames)), InvalidInputError);
  const Sequence short_window = random_sequence(rng, 1, 3);
  CHECK_THROWS_AS(conv_frame(layer, std::span<const Frame>(short_window.frames)),
                  InvalidInputError);
}

TEST_CASE("conv_frame: determinism is bit-exact") {
  Rng rng(99);
  const ConvLayer layer = random_layer(rng, 4, 5, 3);
  const Sequence window = random_sequence(rng, 4, 5);
  const Frame a = conv_frame(layer, std::span<const Frame>(window.frames));
  const Frame b = conv_frame(layer, std::span<const Frame>(window.frames));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(same_bits(a[i], b[i]));
}

TEST_CASE("valid_conv: output length is t - w + 1") {
  Rng rng(11);
  const ConvLayer layer = random_layer(rng, 3, 2, 2);
  const Sequence input = random_sequence(rng, 6, 2);
  const Sequence out = valid_conv(layer, input);
  CHECK(out.length() == 4);
}

TEST_CASE("valid_conv: w=1 identity layer reproduces the input") {
  Rng rng(12);
  const Sequence input = random_sequence(rng, 5, 3);
  const Sequence out = valid_conv(identity_layer(3), input);
  CHECK(same_bits(out, input));
}

TEST_CASE("valid_conv: underflow error when input is shorter than the window") {
  Rng rng(13);
  const ConvLayer layer = random_layer(rng, 4, 2, 2);
  const Sequence input = random_sequence(rng, 3, 2);
  CHECK_THROWS_AS(valid_conv(layer, input), WindowUnderflowError);
}

TEST_CASE("valid_conv: matches the scalar oracle exactly on an exhaustive grid") {
  // every shape with t <= 8, C <= 4, w <= 4, one seeded instance each
  std::uint64_t seed = 1;
  for (std::size_t w = 1; w <= 4; ++w) {
    for (std::size_t cin = 1; cin <= 4; ++cin) {
      for (std::size_t cout = 1; cout <= 4; ++cout) {
        for (std::size_t t = w; t <= 8; ++t) {
          Rng rng(seed++);
          const ConvLayer layer = random_layer(rng, w, cin, cout);
          const Sequence input = random_sequence(rng, t, cin);
          const Sequence expected = oracle::valid_conv_ref(layer, input);
          const Sequence got = valid_conv(layer, input);
          REQUIRE(same_bits(got, expected));
        }
      }
    }
  }
}

TEST_CASE("full_conv_adjoint: output length is t + w - 1") {
  Rng rng(21);
  const ConvLayer layer = random_layer(rng, 3, 2, 4);
  const Sequence hidden = random_sequence(rng, 4, 4);
  CHECK(full_conv_adjoint(layer, hidden).length() == 6);
}

TEST_CASE("full_conv_adjoint: w=1 identity layer reproduces the hidden sequence") {
  Rng rng(22);
  const Sequence hidden = random_sequence(rng, 5, 3);
  const Sequence out = full_conv_adjoint(identity_layer(3), hidden);
  CHECK(same_bits(out, hidden));
}

TEST_CASE("full_conv_adjoint: shape mismatch raises invalid input") {
  Rng rng(23);
  const ConvLayer layer = random_layer(rng, 2, 2, 3);
  const Sequence bad = random_sequence(rng, 4, 2);  // needs out_channels = 3
  CHECK_THROWS_AS(full_conv_adjoint(layer, bad), InvalidInputError);
  const Sequence hidden = random_sequence(rng, 4, 3);
  const std::vector<double> bad_bias(3, 0.0);  // needs in_channels = 2
  CHECK_THROWS_AS(full_conv_adjoint(layer, hidden, bad_bias, Activation::kIdentity),
                  InvalidInputError);
}

TEST_CASE("full_conv_adjoint: matches the scalar oracle exactly") {
  std::uint64_t seed = 31;
  for (std::size_t w = 1; w <= 4; ++w) {
    for (std::size_t th = 1; th <= 5; ++th) {
      Rng rng(seed++);
      const ConvLayer layer = random_layer(rng, w, 3, 2);
      const Sequence hidden = random_sequence(rng, th, 2);
      const std::vector<double> bias{0.125, -0.5, 0.75};
      const Sequence expected =
          oracle::full_conv_adjoint_ref(layer, hidden, bias, Activation::kTanh);
      const Sequence got = full_conv_adjoint(layer, hidden, bias, Activation::kTanh);
      REQUIRE(same_bits(got, expected));
    }
  }
}

TEST_CASE("adjoint identity: <conv(x), h> == <x, adjoint(h)> for the linear parts") {
  // 100 seeded trials. Both sides accumulate the same triple products in
  // different orders, so the error is scaled by the Cauchy-Schwarz bound on
  // the term size rather than by the (possibly cancelling) value itself.
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    Rng rng(1000 + trial);
    const std::size_t w = 1 + rng.below(4);
    const std::size_t cin = 1 + rng.below(4);
    const std::size_t cout = 1 + rng.below(4);
    const std::size_t tx = w + rng.below(6);
    ConvLayer layer = random_layer(rng, w, cin, cout, Activation::kIdentity, 1.0);
    layer.bias.assign(cout, 0.0);
    const Sequence x = random_sequence(rng, tx, cin);
    const Sequence hx = valid_conv(layer, x);
    const Sequence h = random_sequence(rng, hx.length(), cout);
    const Sequence adj = full_conv_adjoint(layer, h, {}, Activation::kIdentity);

    const double lhs = oracle::dot_ref(hx, h);
    const double rhs = oracle::dot_ref(x, adj);
    auto norm = [](const Sequence& s) { return std::sqrt(oracle::dot_ref(s, s)); };
    const double scale = norm(hx) * norm(h) + norm(x) * norm(adj);
    REQUIRE(scale > 0.0);
    CHECK(std::abs(lhs - rhs) / scale <= 1e-12);
  }
}

TEST_CASE("forward_stack: single layer, t=10, w=3 costs 8 ops") {
  Rng rng(41);
  NetworkSpec net;
  net.layers.push_back(random_layer(rng, 3, 2, 2));
  OpCounter counter;
  const auto acts = forward_stack(net, random_sequence(rng, 10, 2), counter);
  CHECK(acts.size() == 1);
  CHECK(acts[0].length() == 8);
  CHECK(counter.total() == 8);
}

TEST_CASE("forward_stack: two layers, t=10, w=3 each costs 8 + 6 = 14 ops") {
  // series terms (10 - 2) + (10 - 4), summed by hand
  Rng rng(42);
  const std::size_t windows[] = {3, 3};
  const std::size_t channels[] = {2, 3, 2};
  const NetworkSpec net = random_network(rng, windows, channels);
  OpCounter counter;
  const auto acts = forward_stack(net, random_sequence(rng, 10, 2), counter);
  CHECK(acts[0].length() == 8);
  CHECK(acts[1].length() == 6);
  CHECK(counter.total() == 14);
  CHECK(counter.layer_total(0) == 8);
  CHECK(counter.layer_total(1) == 6);
}

TEST_CASE("forward_stack: identity stack reproduces the input") {
  NetworkSpec net;
  net.layers.push_back(identity_layer(3));
  net.layers.push_back(identity_layer(3));
  Rng rng(43);
  const Sequence input = random_sequence(rng, 6, 3);
  OpCounter counter;
  const auto acts = forward_stack(net, input, counter);
  CHECK(same_bits(acts.back(), input));
}

TEST_CASE("forward_stack: counter equals the sum of output frame counts") {
  for (std::uint64_t seed = 50; seed < 60; ++seed) {
    Rng rng(seed);
    const std::size_t n = 1 + rng.below(4);
    std::vector<std::size_t> windows, channels;
    channels.push_back(1 + rng.below(4));
    for (std::size_t l = 0; l < n; ++l) {
      windows.push_back(1 + rng.below(4));
      channels.push_back(1 + rng.below(4));
    }
    std::size_t need = 1;
    for (std::size_t w : windows) need += w - 1;
    const std::size_t tx = need + rng.below(5);
    const NetworkSpec net = random_network(rng, windows, channels);
    OpCounter counter;
    const auto acts = forward_stack(net, random_sequence(rng, tx, channels[0]), counter);
    std::uint64_t frames = 0;
    for (std::size_t l = 0; l < acts.size(); ++l) {
      frames += acts[l].length();
      CHECK(counter.layer_total(l) == acts[l].length());
      CHECK(acts[l].length() == layer_output_length(net, l, tx));
    }
    CHECK(counter.total() == frames);
  }
}

TEST_CASE("forward_stack: propagates window underflow") {
  Rng rng(61);
  const std::size_t windows[] = {3, 4};
  const std::size_t channels[] = {2, 2, 2};
  const NetworkSpec net = random_network(rng, windows, channels);
  // 5 input frames leave layer 0 with 3 frames; layer 1 needs 4
  OpCounter counter;
  CHECK_THROWS_AS(forward_stack(net, random_sequence(rng, 5, 2), counter),
                  WindowUnderflowError);
}

TEST_CASE("validate_network rejects broken chains") {
  Rng rng(62);
  NetworkSpec net;
  net.layers.push_back(random_layer(rng, 2, 2, 3));
  net.layers.push_back(random_layer(rng, 2, 4, 2));  // expects 3 input channels
  CHECK_THROWS_AS(validate_network(net), InvalidInputError);
}
