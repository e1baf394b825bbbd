#include "sigbound/model.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "sigbound/relaxation.hpp"

namespace sigbound {

using nlohmann::json;

const char* to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::Sigmoid:
      return "sigmoid";
    case ActivationKind::Tanh:
      return "tanh";
    case ActivationKind::Identity:
      return "none";
  }
  return "none";
}

ActivationKind activation_from_string(const std::string& name) {
  if (name == "sigmoid") return ActivationKind::Sigmoid;
  if (name == "tanh") return ActivationKind::Tanh;
  if (name == "none" || name == "identity" || name == "linear")
    return ActivationKind::Identity;
  throw std::invalid_argument("unknown activation: " + name);
}

void validate_network(const Network& net) {
  if (net.layers.empty())
    throw std::invalid_argument("network must have at least one layer");
  bool identity_tail = false;  // Identity is legal only as a trailing run
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const AffineLayer& layer = net.layers[i];
    if (layer.weights.rows() == 0 || layer.weights.cols() == 0)
      throw std::invalid_argument("layer " + std::to_string(i) + " is empty");
    if (layer.bias.size() != layer.weights.rows())
      throw std::invalid_argument("layer " + std::to_string(i) +
                                  ": bias length does not match row count");
    if (!layer.weights.allFinite() || !layer.bias.allFinite())
      throw std::invalid_argument("layer " + std::to_string(i) +
                                  ": non-finite entry");
    if (i > 0 && layer.in_dim() != net.layers[i - 1].out_dim())
      throw std::invalid_argument(
          "shape error: layer " + std::to_string(i) + " expects input dim " +
          std::to_string(layer.in_dim()) + " but previous layer outputs " +
          std::to_string(net.layers[i - 1].out_dim()));
    if (layer.activation == ActivationKind::Identity)
      identity_tail = true;
    else if (identity_tail)
      throw std::invalid_argument(
          "Identity activation is only legal on trailing layers");
  }
}

namespace {

Eigen::MatrixXd parse_matrix(const json& rows) {
  if (!rows.is_array() || rows.empty())
    throw std::runtime_error("weights must be a nonempty array of rows");
  const std::size_t cols = rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols)
      throw std::runtime_error("ragged weight matrix");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r][c].get<double>();
  }
  return m;
}

Eigen::VectorXd parse_vector(const json& values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = values[i].get<double>();
  return v;
}

// Kernel tensor [out_c][in_c][kh][kw]; a 2-d kernel array is read as a
// single-channel [kh][kw] filter.
struct ConvKernel {
  std::vector<double> data;
  Eigen::Index out_c = 0, in_c = 0, kh = 0, kw = 0;

  double at(Eigen::Index oc, Eigen::Index ic, Eigen::Index y,
            Eigen::Index x) const {
    return data[static_cast<std::size_t>(((oc * in_c + ic) * kh + y) * kw +
                                         x)];
  }
};

int json_depth(const json& j) {
  if (!j.is_array() || j.empty()) return 0;
  return 1 + json_depth(j.front());
}

ConvKernel parse_kernel(const json& j) {
  ConvKernel k;
  const int depth = json_depth(j);
  if (depth == 2) {
    k.out_c = 1;
    k.in_c = 1;
    k.kh = static_cast<Eigen::Index>(j.size());
    k.kw = static_cast<Eigen::Index>(j.front().size());
    for (const auto& row : j)
      for (const auto& v : row) k.data.push_back(v.get<double>());
    return k;
  }
  if (depth == 4) {
    k.out_c = static_cast<Eigen::Index>(j.size());
    k.in_c = static_cast<Eigen::Index>(j.front().size());
    k.kh = static_cast<Eigen::Index>(j.front().front().size());
    k.kw = static_cast<Eigen::Index>(j.front().front().front().size());
    for (const auto& oc : j)
      for (const auto& ic : oc)
        for (const auto& row : ic)
          for (const auto& v : row) k.data.push_back(v.get<double>());
    if (k.data.size() !=
        static_cast<std::size_t>(k.out_c * k.in_c * k.kh * k.kw))
      throw std::runtime_error("ragged conv kernel");
    return k;
  }
  throw std::runtime_error("conv kernel must be a 2-d or 4-d nested array");
}

// im2col-style unrolling of a valid (unpadded) convolution into one dense
// affine layer over the flattened [c][h][w] input.
AffineLayer lower_conv(const ConvKernel& kernel, const Eigen::VectorXd& bias,
                       Eigen::Index stride, Eigen::Index in_c, Eigen::Index h,
                       Eigen::Index w) {
  if (stride < 1) throw std::runtime_error("conv stride must be >= 1");
  if (kernel.in_c != in_c)
    throw std::runtime_error("conv kernel channels do not match input_shape");
  if (kernel.kh > h || kernel.kw > w)
    throw std::runtime_error("conv kernel larger than its input");
  const Eigen::Index oh = (h - kernel.kh) / stride + 1;
  const Eigen::Index ow = (w - kernel.kw) / stride + 1;

  AffineLayer layer;
  layer.weights = Eigen::MatrixXd::Zero(kernel.out_c * oh * ow, in_c * h * w);
  layer.bias = Eigen::VectorXd::Zero(kernel.out_c * oh * ow);
  for (Eigen::Index oc = 0; oc < kernel.out_c; ++oc)
    for (Eigen::Index oy = 0; oy < oh; ++oy)
      for (Eigen::Index ox = 0; ox < ow; ++ox) {
        const Eigen::Index row = (oc * oh + oy) * ow + ox;
        if (bias.size() > 0) layer.bias(row) = bias(oc);
        for (Eigen::Index ic = 0; ic < in_c; ++ic)
          for (Eigen::Index ky = 0; ky < kernel.kh; ++ky)
            for (Eigen::Index kx = 0; kx < kernel.kw; ++kx) {
              const Eigen::Index iy = oy * stride + ky;
              const Eigen::Index ix = ox * stride + kx;
              const Eigen::Index col = (ic * h + iy) * w + ix;
              layer.weights(row, col) = kernel.at(oc, ic, ky, kx);
            }
      }
  return layer;
}

}  // namespace

Network load_network(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("network parse error: ") + e.what());
  }

  if (!doc.contains("layers") || !doc["layers"].is_array())
    throw std::runtime_error("network JSON needs a \"layers\" array");

  Network net;
  for (const auto& spec : doc["layers"]) {
    const std::string type = spec.value("type", "dense");
    const ActivationKind act =
        activation_from_string(spec.value("activation", "none"));
    if (type == "dense") {
      AffineLayer layer;
      layer.weights = parse_matrix(spec.at("weights"));
      layer.bias = spec.contains("bias")
                       ? parse_vector(spec.at("bias"))
                       : Eigen::VectorXd::Zero(layer.weights.rows());
      layer.activation = act;
      net.layers.push_back(std::move(layer));
    } else if (type == "conv2d") {
      const auto& shape = spec.at("input_shape");
      if (shape.size() != 3)
        throw std::runtime_error("conv2d input_shape must be [c, h, w]");
      const ConvKernel kernel = parse_kernel(spec.at("kernel"));
      Eigen::VectorXd bias;
      if (spec.contains("bias")) {
        bias = parse_vector(spec.at("bias"));
        if (bias.size() != kernel.out_c)
          throw std::runtime_error("conv bias length must equal out channels");
      }
      AffineLayer layer = lower_conv(
          kernel, bias, spec.value("stride", Eigen::Index{1}),
          shape[0].get<Eigen::Index>(), shape[1].get<Eigen::Index>(),
          shape[2].get<Eigen::Index>());
      layer.activation = act;
      net.layers.push_back(std::move(layer));
    } else {
      throw std::runtime_error("unsupported layer type: " + type);
    }
  }

  if (doc.contains("input_dim") &&
      doc["input_dim"].get<Eigen::Index>() != net.input_dim())
    throw std::runtime_error("shape error: declared input_dim " +
                             doc["input_dim"].dump() +
                             " does not match first layer");
  validate_network(net);
  return net;
}

Network load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open network file: " + path);
  return load_network(in);
}

std::string network_to_json(const Network& net) {
  json doc;
  doc["input_dim"] = net.input_dim();
  doc["layers"] = json::array();
  for (const AffineLayer& layer : net.layers) {
    json spec;
    spec["type"] = "dense";
    json rows = json::array();
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c)
        row.push_back(layer.weights(r, c));
      rows.push_back(std::move(row));
    }
    spec["weights"] = std::move(rows);
    json bias = json::array();
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i)
      bias.push_back(layer.bias(i));
    spec["bias"] = std::move(bias);
    spec["activation"] = to_string(layer.activation);
    doc["layers"].push_back(std::move(spec));
  }
  return doc.dump(2);
}

Eigen::VectorXd eval_forward(const Network& net, const Eigen::VectorXd& x) {
  if (x.size() != net.input_dim())
    throw std::invalid_argument("eval_forward: input dim mismatch");
  Eigen::VectorXd v = x;
  for (const AffineLayer& layer : net.layers) {
    v = layer.weights * v + layer.bias;
    if (layer.activation != ActivationKind::Identity)
      for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) = sigma(layer.activation, v(i));
  }
  return v;
}

Network append_margin_layer(const Network& net, Eigen::Index true_label,
                            Eigen::Index other_label) {
  const Eigen::Index m = net.output_dim();
  if (true_label < 0 || true_label >= m || other_label < 0 || other_label >= m)
    throw std::invalid_argument("margin label out of range");
  if (true_label == other_label)
    throw std::invalid_argument("margin labels must differ");
  if (net.layers.back().activation != ActivationKind::Identity)
    throw std::invalid_argument(
        "margin layer requires an Identity final activation");

  Network out = net;
  AffineLayer margin;
  margin.weights = Eigen::MatrixXd::Zero(1, m);
  margin.weights(0, true_label) = 1.0;
  margin.weights(0, other_label) = -1.0;
  margin.bias = Eigen::VectorXd::Zero(1);
  margin.activation = ActivationKind::Identity;
  out.layers.push_back(std::move(margin));
  return out;
}

Network gen_random_network(const RandomNetworkSpec& spec, std::uint64_t seed) {
  if (spec.sizes.size() < 2)
    throw std::invalid_argument("need at least input and output sizes");
  if (spec.weight_scale <= 0)
    throw std::invalid_argument("weight scale must be positive");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-spec.weight_scale,
                                              spec.weight_scale);
  Network net;
  for (std::size_t i = 1; i < spec.sizes.size(); ++i) {
    AffineLayer layer;
    layer.weights = Eigen::MatrixXd(spec.sizes[i], spec.sizes[i - 1]);
    layer.bias = Eigen::VectorXd(spec.sizes[i]);
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c)
        layer.weights(r, c) = dist(rng);
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r)
      layer.bias(r) = dist(rng);
    const bool last = i + 1 == spec.sizes.size();
    layer.activation = (last && spec.identity_output) ? ActivationKind::Identity
                                                      : spec.activation;
    net.layers.push_back(std::move(layer));
  }
  validate_network(net);
  return net;
}

}  // namespace sigbound
