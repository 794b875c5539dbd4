#include "shiftconv/model_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "shiftconv/csv.hpp"
#include "shiftconv/errors.hpp"

namespace shiftconv {

namespace {

using nlohmann::json;

json layer_to_json(const ConvLayer& layer) {
  json weights = json::array();
  for (const Matrix& tap : layer.taps) {
    json rows = json::array();
    for (std::size_t i = 0; i < tap.rows; ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < tap.cols; ++j) row.push_back(tap(i, j));
      rows.push_back(std::move(row));
    }
    weights.push_back(std::move(rows));
  }
  return json{{"window", layer.window()},
              {"in_channels", layer.in_channels()},
              {"out_channels", layer.out_channels()},
              {"activation", to_string(layer.activation)},
              {"weights", std::move(weights)},
              {"bias", layer.bias}};
}

Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "identity") return Activation::kIdentity;
  throw ParseError("unknown activation '" + name + "'");
}

ConvLayer layer_from_json(const json& j) {
  ConvLayer layer;
  const auto window = j.at("window").get<std::size_t>();
  const auto cin = j.at("in_channels").get<std::size_t>();
  const auto cout = j.at("out_channels").get<std::size_t>();
  layer.activation = parse_activation(j.at("activation").get<std::string>());
  const json& weights = j.at("weights");
  if (!weights.is_array() || weights.size() != window) {
    throw ParseError("layer weights must hold one matrix per window tap");
  }
  layer.taps.reserve(window);
  for (const json& rows : weights) {
    if (!rows.is_array() || rows.size() != cout) {
      throw ParseError("weight matrix row count does not match out_channels");
    }
    Matrix tap(cout, cin);
    for (std::size_t i = 0; i < cout; ++i) {
      const json& row = rows[i];
      if (!row.is_array() || row.size() != cin) {
        throw ParseError("weight matrix column count does not match in_channels");
      }
      for (std::size_t j2 = 0; j2 < cin; ++j2) tap(i, j2) = row[j2].get<double>();
    }
    layer.taps.push_back(std::move(tap));
  }
  layer.bias = j.at("bias").get<std::vector<double>>();
  return layer;
}

}  // namespace

std::string serialize_model(const ModelFile& model) {
  validate_network(model.network);
  json j;
  j["format"] = "shiftconv-model";
  j["version"] = 1;
  json layers = json::array();
  for (const ConvLayer& layer : model.network.layers) layers.push_back(layer_to_json(layer));
  j["layers"] = std::move(layers);
  if (model.decoder_bias) j["decoder_bias"] = *model.decoder_bias;
  return j.dump(2) + "\n";
}

ModelFile parse_model(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.value("format", std::string{}) != "shiftconv-model") {
      throw ParseError("not a shiftconv model file");
    }
    ModelFile model;
    for (const json& jl : j.at("layers")) model.network.layers.push_back(layer_from_json(jl));
    if (j.contains("decoder_bias")) {
      model.decoder_bias = j.at("decoder_bias").get<std::vector<double>>();
    }
    validate_network(model.network);
    if (model.decoder_bias &&
        model.decoder_bias->size() != model.network.input_channels()) {
      throw ParseError("decoder bias length must match the input channel count");
    }
    return model;
  } catch (const json::exception& e) {
    throw ParseError(std::string("model parse failed: ") + e.what());
  } catch (const InvalidInputError& e) {
    throw ParseError(std::string("model invalid: ") + e.what());
  }
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

void save_model(const ModelFile& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write model file '" + path + "'");
  out << serialize_model(model);
}

CAEModel to_cae(const ModelFile& model) {
  if (model.network.depth() != 1) {
    throw InvalidInputError("auto-encoder models carry exactly one layer");
  }
  CAEModel cae;
  cae.encoder = model.network.layers.front();
  cae.decoder_bias = model.decoder_bias
                         ? *model.decoder_bias
                         : std::vector<double>(cae.encoder.in_channels(), 0.0);
  return cae;
}

ModelFile from_cae(const CAEModel& model) {
  ModelFile out;
  out.network.layers.push_back(model.encoder);
  out.decoder_bias = model.decoder_bias;
  return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_field_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ParseError("bad numeric field '" + s + "' on line " + std::to_string(line_no));
  }
  if (!std::isfinite(v)) {
    throw ParseError("non-finite value on line " + std::to_string(line_no));
  }
  return v;
}

struct CsvBody {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> comments;
};

CsvBody read_csv_body(std::istream& in) {
  CsvBody body;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      body.comments.push_back(line);
      continue;
    }
    auto fields = split_fields(line);
    if (!have_header) {
      body.header = std::move(fields);
      have_header = true;
    } else {
      if (fields.size() != body.header.size()) {
        throw ParseError("row on line " + std::to_string(line_no) + " has " +
                         std::to_string(fields.size()) + " fields, header has " +
                         std::to_string(body.header.size()));
      }
      body.rows.push_back(std::move(fields));
    }
  }
  if (!have_header) throw ParseError("empty CSV: missing header row");
  return body;
}

// `# key=value ...` comment scan.
std::size_t comment_value(const std::vector<std::string>& comments,
                          const std::string& key) {
  const std::string needle = key + "=";
  for (const std::string& c : comments) {
    auto pos = c.find(needle);
    if (pos == std::string::npos) continue;
    pos += needle.size();
    std::size_t end = pos;
    while (end < c.size() && std::isdigit(static_cast<unsigned char>(c[end]))) ++end;
    if (end > pos) return std::stoull(c.substr(pos, end - pos));
  }
  return 0;
}

}  // namespace

void write_stream_csv(std::ostream& out, const Sequence& stream) {
  const std::size_t c = stream.context();
  for (std::size_t j = 0; j < c; ++j) out << (j ? "," : "") << "c" << j;
  out << "\n";
  for (const Frame& f : stream.frames) {
    for (std::size_t j = 0; j < c; ++j) {
      out << (j ? "," : "") << csv::format_double(f[j]);
    }
    out << "\n";
  }
}

Sequence read_stream_csv(std::istream& in) {
  const CsvBody body = read_csv_body(in);
  std::size_t context = body.header.size();
  if (!body.header.empty() && body.header.back() == "label") --context;
  if (context == 0) throw ParseError("stream CSV has no value columns");
  Sequence out;
  out.frames.reserve(body.rows.size());
  std::size_t line_no = 1;
  for (const auto& row : body.rows) {
    ++line_no;
    Frame f(context);
    for (std::size_t j = 0; j < context; ++j) f[j] = parse_field_double(row[j], line_no);
    out.frames.push_back(std::move(f));
  }
  return out;
}

void write_dataset_csv(std::ostream& out, const LabeledDataset& dataset) {
  validate_dataset(dataset);
  const std::size_t c = dataset.samples.front().context();
  const std::size_t t = dataset.samples.front().length();
  out << "# classes=" << dataset.num_classes << " samples=" << dataset.samples.size()
      << " frames=" << t << " context=" << c << "\n";
  for (std::size_t j = 0; j < c; ++j) out << "c" << j << ",";
  out << "label\n";
  for (std::size_t s = 0; s < dataset.samples.size(); ++s) {
    for (const Frame& f : dataset.samples[s].frames) {
      for (std::size_t j = 0; j < c; ++j) out << csv::format_double(f[j]) << ",";
      out << dataset.labels[s] << "\n";
    }
  }
}

LabeledDataset read_dataset_csv(std::istream& in, std::size_t frames_per_sample) {
  const CsvBody body = read_csv_body(in);
  if (body.header.empty() || body.header.back() != "label") {
    throw ParseError("dataset CSV needs a final 'label' column");
  }
  const std::size_t context = body.header.size() - 1;
  if (context == 0) throw ParseError("dataset CSV has no value columns");
  std::size_t frames = frames_per_sample;
  if (frames == 0) frames = comment_value(body.comments, "frames");
  if (frames == 0) {
    throw ParseError("frames per sample unknown: no '# frames=' comment and no override");
  }
  if (body.rows.empty() || body.rows.size() % frames != 0) {
    throw ParseError("dataset row count is not a multiple of frames per sample");
  }

  LabeledDataset out;
  std::size_t max_label = 0;
  std::size_t line_no = 1;
  for (std::size_t base = 0; base < body.rows.size(); base += frames) {
    Sequence sample;
    sample.frames.reserve(frames);
    std::size_t label = 0;
    for (std::size_t r = 0; r < frames; ++r) {
      const auto& row = body.rows[base + r];
      ++line_no;
      Frame f(context);
      for (std::size_t j = 0; j < context; ++j) f[j] = parse_field_double(row[j], line_no);
      const auto this_label =
          static_cast<std::size_t>(parse_field_double(row[context], line_no));
      if (r == 0) {
        label = this_label;
      } else if (this_label != label) {
        throw ParseError("label changes inside a sample near line " + std::to_string(line_no));
      }
      sample.frames.push_back(std::move(f));
    }
    out.samples.push_back(std::move(sample));
    out.labels.push_back(label);
    max_label = std::max(max_label, label);
  }
  const std::size_t declared = comment_value(body.comments, "classes");
  out.num_classes = declared > max_label ? declared : max_label + 1;
  validate_dataset(out);
  return out;
}

}  // namespace shiftconv
