#pragma once

#include "sigbound/search.hpp"

namespace sigbound {

enum class Direction { Lower, Upper };

/// Linear function of the raw network input, certified as a one-sided bound
/// on some target quantity over an input region.
struct SymbolicBound {
  Eigen::VectorXd coeffs;
  double constant = 0.0;
  Direction direction = Direction::Lower;

  double operator()(const Eigen::VectorXd& x) const {
    return coeffs.dot(x) + constant;
  }
};

/// Elementwise pre-activation interval of one layer.
struct LayerBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

/// Bound target: pre-activation of (layer, neuron), or the post-activation
/// value when post_activation is set.
struct BoundTarget {
  Eigen::Index layer = 0;
  Eigen::Index neuron = 0;
  bool post_activation = false;
};

/// Full-layer form of a symbolic bound: row k bounds neuron k.
struct LayerSymbolic {
  Eigen::MatrixXd coeffs;
  Eigen::VectorXd constants;
};

/// Everything a propagation pass produces besides the output bound:
/// per-layer pre-activation intervals and per-neuron relaxations
/// (empty vector for Identity layers).
struct BoundArtifacts {
  std::vector<LayerBounds> layer_bounds;
  std::vector<std::vector<NeuronRelaxation>> relaxations;
};

struct GlobalBoundResult {
  double g_star = 0.0;
  SymbolicBound bound;
  BoundArtifacts artifacts;
};

/// Back-substitution through affine layers and activation relaxations.
/// Lower direction: a nonnegative coefficient selects the neuron's lower
/// line, a negative one its upper line; mirrored for Upper. Relaxations must
/// be present for every non-Identity activation the pass crosses.
SymbolicBound backward_substitute(
    const Network& net,
    const std::vector<std::vector<NeuronRelaxation>>& relaxations,
    const BoundTarget& target, Direction direction);

LayerSymbolic backward_substitute_layer(
    const Network& net,
    const std::vector<std::vector<NeuronRelaxation>>& relaxations,
    Eigen::Index layer, Direction direction, bool post_activation = false);

/// Exact optimum of a linear function over the l-infinity ball:
/// coeffs . x0 + c -/+ radius * ||coeffs||_1.
double concretize(const SymbolicBound& bound, const InputRegion& region);

/// Front-to-back pass: bound each layer's pre-activations by full backward
/// substitution, then relax its activation with tangents from the strategy.
BoundArtifacts compute_preactivation_bounds(const Network& net,
                                            const InputRegion& region,
                                            const TangentStrategy& strategy);

/// g* = concretized lower bound of a scalar-output network over the region.
GlobalBoundResult global_lower_bound(const Network& net_with_margin,
                                     const InputRegion& region,
                                     const TangentStrategy& strategy);

}  // namespace sigbound
