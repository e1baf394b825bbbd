#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sigbound {

enum class ActivationKind { Sigmoid, Tanh, Identity };

const char* to_string(ActivationKind kind);
ActivationKind activation_from_string(const std::string& name);

/// One affine transform y = W x + b followed by an elementwise activation.
struct AffineLayer {
  Eigen::MatrixXd weights;  // rows = output dim, cols = input dim
  Eigen::VectorXd bias;
  ActivationKind activation = ActivationKind::Identity;

  Eigen::Index in_dim() const { return weights.cols(); }
  Eigen::Index out_dim() const { return weights.rows(); }
};

/// Feedforward network as an ordered chain of affine layers. Layer
/// dimensions must chain and only the final layer may be Identity.
struct Network {
  std::vector<AffineLayer> layers;

  Eigen::Index input_dim() const { return layers.front().in_dim(); }
  Eigen::Index output_dim() const { return layers.back().out_dim(); }
  Eigen::Index num_layers() const {
    return static_cast<Eigen::Index>(layers.size());
  }
};

/// l-infinity ball of the given radius around a centre point.
struct InputRegion {
  Eigen::VectorXd center;
  double radius = 0.0;
};

/// Shape description consumed by gen_random_network.
struct RandomNetworkSpec {
  std::vector<Eigen::Index> sizes;  // input dim, hidden dims..., output dim
  ActivationKind activation = ActivationKind::Sigmoid;
  double weight_scale = 1.0;
  bool identity_output = true;  // final layer activation is Identity
};

/// Throws std::invalid_argument when a Network invariant is broken
/// (empty chain, dimension mismatch, non-final Identity, non-finite entry).
void validate_network(const Network& net);

/// Parse a network from its JSON description. conv2d layers are lowered to
/// equivalent dense layers on load so that everything downstream sees a
/// plain affine chain.
Network load_network(std::istream& in);
Network load_network_file(const std::string& path);

/// Serialize as dense-layer JSON (the load format, conv already lowered).
std::string network_to_json(const Network& net);

Eigen::VectorXd eval_forward(const Network& net, const Eigen::VectorXd& x);

/// Append the row that computes f_true(x) - f_other(x), turning an m-class
/// network into a scalar margin network.
Network append_margin_layer(const Network& net, Eigen::Index true_label,
                            Eigen::Index other_label);

Network gen_random_network(const RandomNetworkSpec& spec, std::uint64_t seed);

}  // namespace sigbound
