#include "fwips/model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "text_io.hpp"

namespace fwips {
namespace {

void write_vector(std::ofstream& out, const char* key,
                  const std::vector<double>& values) {
  out << key;
  for (double v : values) out << " " << detail::format_double(v);
  out << "\n";
}

void write_normalizer(std::ofstream& out, const char* key,
                      const AffineNormalizer& normalizer) {
  if (normalizer.passthrough()) {
    out << key << " passthrough\n";
    return;
  }
  out << key << " " << normalizer.dims() << "\n";
  write_vector(out, "scale", normalizer.scale());
  write_vector(out, "offset", normalizer.offset());
  write_vector(out, "reference", normalizer.reference());
}

class LineReader {
 public:
  LineReader(std::istream& in, std::string context)
      : in_(in), context_(std::move(context)) {}

  // Next non-empty line split on spaces; first token must equal `key`.
  std::vector<std::string> expect(const std::string& key) {
    std::string line;
    while (std::getline(in_, line)) {
      line = detail::strip(line);
      if (line.empty()) continue;
      std::vector<std::string> tokens;
      std::istringstream stream(line);
      std::string token;
      while (stream >> token) tokens.push_back(token);
      if (tokens.empty() || tokens.front() != key) {
        throw std::invalid_argument(context_ + ": expected '" + key +
                                    "', found '" + line + "'");
      }
      return tokens;
    }
    throw std::invalid_argument(context_ + ": unexpected end of file, expected '" +
                                key + "'");
  }

  std::size_t expect_count(const std::string& key) {
    const auto tokens = expect(key);
    if (tokens.size() != 2) {
      throw std::invalid_argument(context_ + ": '" + key + "' needs one value");
    }
    return static_cast<std::size_t>(detail::parse_int(tokens[1], context_));
  }

  std::vector<double> expect_values(const std::string& key, std::size_t count) {
    const auto tokens = expect(key);
    if (tokens.size() != count + 1) {
      throw std::invalid_argument(context_ + ": '" + key + "' needs " +
                                  std::to_string(count) + " values, found " +
                                  std::to_string(tokens.size() - 1));
    }
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
      values[i] = detail::parse_double(tokens[i + 1], context_);
    }
    return values;
  }

  const std::string& context() const { return context_; }

 private:
  std::istream& in_;
  std::string context_;
};

AffineNormalizer read_normalizer(LineReader& reader, const std::string& key) {
  const auto tokens = reader.expect(key);
  if (tokens.size() != 2) {
    throw std::invalid_argument(reader.context() + ": malformed '" + key + "'");
  }
  if (tokens[1] == "passthrough") return AffineNormalizer{};
  const auto dims =
      static_cast<std::size_t>(detail::parse_int(tokens[1], reader.context()));
  auto scale = reader.expect_values("scale", dims);
  auto offset = reader.expect_values("offset", dims);
  auto reference = reader.expect_values("reference", dims);
  return AffineNormalizer(std::move(scale), std::move(offset),
                          std::move(reference));
}

}  // namespace

void save_network(const Network& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");

  out << kModelMagic << "\n";
  out << "in_dim " << net.in_dim() << "\n";
  out << "out_dim " << net.out_dim() << "\n";
  out << "hidden_layers " << net.hidden_layer_count() << "\n";
  out << "hidden_widths";
  for (std::size_t m = 0; m + 1 < net.layer_count(); ++m) {
    out << " " << net.layers()[m].fan_out();
  }
  out << "\n";
  write_normalizer(out, "input_normalizer", net.input_normalizer());
  write_normalizer(out, "target_normalizer", net.target_normalizer());
  for (std::size_t m = 0; m < net.layer_count(); ++m) {
    const Layer& layer = net.layers()[m];
    out << "layer " << m << " " << to_string(layer.activation) << " "
        << layer.fan_in() << " " << layer.fan_out() << "\n";
    write_vector(out, "weights", layer.weights.data);
    write_vector(out, "biases", layer.biases);
  }
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  const std::string context = "'" + path + "'";

  std::string magic;
  if (!std::getline(in, magic) || detail::strip(magic) != kModelMagic) {
    throw std::invalid_argument(context + ": not a model file (bad magic line)");
  }

  LineReader reader(in, context);
  const std::size_t in_dim = reader.expect_count("in_dim");
  const std::size_t out_dim = reader.expect_count("out_dim");
  const std::size_t hidden = reader.expect_count("hidden_layers");
  const auto width_tokens = reader.expect("hidden_widths");
  if (width_tokens.size() != hidden + 1) {
    throw std::invalid_argument(context + ": hidden_widths does not match hidden_layers");
  }
  std::vector<std::size_t> widths(hidden);
  for (std::size_t i = 0; i < hidden; ++i) {
    widths[i] =
        static_cast<std::size_t>(detail::parse_int(width_tokens[i + 1], context));
  }

  AffineNormalizer input_normalizer = read_normalizer(reader, "input_normalizer");
  AffineNormalizer target_normalizer = read_normalizer(reader, "target_normalizer");

  std::vector<Layer> layers;
  for (std::size_t m = 0; m < hidden + 1; ++m) {
    const auto header = reader.expect("layer");
    if (header.size() != 5) {
      throw std::invalid_argument(context + ": malformed layer header");
    }
    if (static_cast<std::size_t>(detail::parse_int(header[1], context)) != m) {
      throw std::invalid_argument(context + ": layer index out of order");
    }
    Layer layer;
    layer.activation = activation_from_string(header[2]);
    const auto fan_in =
        static_cast<std::size_t>(detail::parse_int(header[3], context));
    const auto fan_out =
        static_cast<std::size_t>(detail::parse_int(header[4], context));
    layer.weights = Matrix(fan_in, fan_out);
    layer.weights.data = reader.expect_values("weights", fan_in * fan_out);
    layer.biases = reader.expect_values("biases", fan_out);
    layers.push_back(std::move(layer));
  }

  Network net(std::move(input_normalizer), std::move(layers),
              std::move(target_normalizer));
  if (net.in_dim() != in_dim || net.out_dim() != out_dim) {
    throw std::invalid_argument(context + ": layer shapes contradict declared dimensions");
  }
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (net.layers()[i].fan_out() != widths[i]) {
      throw std::invalid_argument(context + ": hidden widths contradict layer shapes");
    }
  }
  return net;
}

}  // namespace fwips
