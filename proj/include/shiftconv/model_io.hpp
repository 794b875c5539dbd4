#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "shiftconv/cae.hpp"
#include "shiftconv/types.hpp"

namespace shiftconv {

// On-disk model: a layer stack plus an optional reconstruction bias. JSON with
// full-precision numbers; parse(serialize(m)) reproduces every parameter
// bit-for-bit.
struct ModelFile {
  NetworkSpec network;
  std::optional<std::vector<double>> decoder_bias;
};

std::string serialize_model(const ModelFile& model);
ModelFile parse_model(const std::string& text);  // throws ParseError

ModelFile load_model(const std::string& path);
void save_model(const ModelFile& model, const std::string& path);

// A single-layer model with a decoder bias maps onto a CAE.
CAEModel to_cae(const ModelFile& model);
ModelFile from_cae(const CAEModel& model);

// Frame stream CSV: header c0..c{C-1}, one row per frame.
void write_stream_csv(std::ostream& out, const Sequence& stream);
Sequence read_stream_csv(std::istream& in);

// Labeled dataset CSV: stream format plus a final `label` column; each sample
// contributes frames_per_sample consecutive rows. Geometry is recorded in
// `# key=value` comment lines so the file reloads without extra flags.
void write_dataset_csv(std::ostream& out, const LabeledDataset& dataset);
LabeledDataset read_dataset_csv(std::istream& in,
                                std::size_t frames_per_sample = 0);

}  // namespace shiftconv
