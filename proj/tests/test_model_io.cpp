#include <bit>
#include <cstdint>
#include <sstream>

#include <doctest.h>

#include "shiftconv/conv_core.hpp"
#include "shiftconv/errors.hpp"
#include "shiftconv/model_io.hpp"

using namespace shiftconv;

namespace {

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

ModelFile random_model(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t windows[] = {3, 2};
  const std::size_t channels[] = {2, 4, 3};
  ModelFile model;
  model.network = random_network(rng, windows, channels);
  // values exercising non-trivial decimal round-trips
  model.network.layers[0].taps[0](0, 0) = 0.1;
  model.network.layers[0].taps[1](1, 1) = 1.0 / 3.0;
  model.network.layers[0].bias[0] = 6.02214076e23;
  model.network.layers[1].bias[2] = -5e-324;  // smallest subnormal
  model.decoder_bias = std::vector<double>{0.25, -1.7976931348623157e308};
  return model;
}

}  // namespace

TEST_CASE("model round-trip reproduces every parameter bit-for-bit") {
  const ModelFile model = random_model(1);
  const ModelFile back = parse_model(serialize_model(model));
  REQUIRE(back.network.depth() == model.network.depth());
  for (std::size_t l = 0; l < model.network.depth(); ++l) {
    const ConvLayer& a = model.network.layers[l];
    const ConvLayer& b = back.network.layers[l];
    REQUIRE(a.window() == b.window());
    REQUIRE(a.in_channels() == b.in_channels());
    REQUIRE(a.out_channels() == b.out_channels());
    CHECK(a.activation == b.activation);
    for (std::size_t tau = 0; tau < a.window(); ++tau) {
      for (std::size_t e = 0; e < a.taps[tau].data.size(); ++e) {
        CHECK(same_bits(a.taps[tau].data[e], b.taps[tau].data[e]));
      }
    }
    for (std::size_t i = 0; i < a.bias.size(); ++i) CHECK(same_bits(a.bias[i], b.bias[i]));
  }
  REQUIRE(back.decoder_bias.has_value());
  for (std::size_t j = 0; j < model.decoder_bias->size(); ++j) {
    CHECK(same_bits((*back.decoder_bias)[j], (*model.decoder_bias)[j]));
  }
  // serialized forms are byte-identical too
  CHECK(serialize_model(back) == serialize_model(model));
}

TEST_CASE("model files with broken layer chaining fail at parse time") {
  ModelFile model = random_model(2);
  std::string text = serialize_model(model);
  // corrupt the chaining by editing the declared channel count
  const auto pos = text.find("\"in_channels\": 4");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 16, "\"in_channels\": 5");
  CHECK_THROWS_AS(parse_model(text), ParseError);
}

TEST_CASE("malformed documents fail cleanly") {
  CHECK_THROWS_AS(parse_model("not json"), ParseError);
  CHECK_THROWS_AS(parse_model("{}"), ParseError);
  CHECK_THROWS_AS(parse_model(R"({"format":"shiftconv-model","layers":[]})"), ParseError);
  CHECK_THROWS_AS(load_model("/nonexistent/path.json"), ParseError);
}

TEST_CASE("cae conversion requires a single layer and defaults the decoder bias") {
  ModelFile model = random_model(3);
  CHECK_THROWS_AS(to_cae(model), InvalidInputError);  // two layers

  ModelFile single;
  Rng rng(4);
  single.network.layers.push_back(random_layer(rng, 2, 3, 2));
  const CAEModel cae = to_cae(single);
  CHECK(cae.decoder_bias == std::vector<double>(3, 0.0));

  const ModelFile back = from_cae(cae);
  CHECK(back.network.depth() == 1);
  REQUIRE(back.decoder_bias.has_value());
}

TEST_CASE("stream CSV round-trips frames") {
  Rng rng(5);
  const Sequence stream = random_sequence(rng, 7, 3);
  std::stringstream buf;
  write_stream_csv(buf, stream);
  const Sequence back = read_stream_csv(buf);
  REQUIRE(back.length() == stream.length());
  REQUIRE(back.context() == stream.context());
  for (std::size_t t = 0; t < stream.length(); ++t) {
    for (std::size_t j = 0; j < stream.context(); ++j) {
      CHECK(same_bits(back.frames[t][j], stream.frames[t][j]));
    }
  }
}

TEST_CASE("stream CSV rejects ragged and non-numeric rows") {
  {
    std::stringstream buf("c0,c1\n1.0,2.0\n3.0\n");
    CHECK_THROWS_AS(read_stream_csv(buf), ParseError);
  }
  {
    std::stringstream buf("c0,c1\n1.0,abc\n");
    CHECK_THROWS_AS(read_stream_csv(buf), ParseError);
  }
  {
    std::stringstream buf("c0,c1\n1.0,inf\n");
    CHECK_THROWS_AS(read_stream_csv(buf), ParseError);
  }
  {
    std::stringstream buf("");
    CHECK_THROWS_AS(read_stream_csv(buf), ParseError);
  }
}

TEST_CASE("dataset CSV round-trips samples, labels, and geometry") {
  const LabeledDataset data = synth_dataset(3, 4, 2, 5, 6);
  std::stringstream buf;
  write_dataset_csv(buf, data);
  const LabeledDataset back = read_dataset_csv(buf);
  CHECK(back.num_classes == 3);
  REQUIRE(back.samples.size() == data.samples.size());
  CHECK(back.labels == data.labels);
  for (std::size_t s = 0; s < data.samples.size(); ++s) {
    REQUIRE(back.samples[s].length() == 5);
    for (std::size_t t = 0; t < 5; ++t) {
      for (std::size_t j = 0; j < 2; ++j) {
        CHECK(same_bits(back.samples[s].frames[t][j], data.samples[s].frames[t][j]));
      }
    }
  }
}

TEST_CASE("dataset CSV without geometry comments needs the override") {
  const LabeledDataset data = synth_dataset(2, 2, 2, 4, 7);
  std::stringstream buf;
  write_dataset_csv(buf, data);
  // strip the comment line
  std::string text = buf.str();
  text.erase(0, text.find('\n') + 1);
  {
    std::stringstream in(text);
    CHECK_THROWS_AS(read_dataset_csv(in), ParseError);
  }
  {
    std::stringstream in(text);
    const LabeledDataset back = read_dataset_csv(in, 4);
    CHECK(back.samples.size() == 4);
  }
  {
    std::stringstream in(text);
    CHECK_THROWS_AS(read_dataset_csv(in, 3), ParseError);  // 16 rows, not divisible
  }
}

TEST_CASE("dataset CSV rejects label changes inside a sample") {
  std::stringstream buf("# frames=2\nc0,label\n1.0,0\n2.0,1\n");
  CHECK_THROWS_AS(read_dataset_csv(buf), ParseError);
}
