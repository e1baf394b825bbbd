#include "sigbound/propagation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sigbound {

namespace {

// Substitute one activation layer into a bundle of linear forms: each
// coefficient picks its neuron's lower or upper line by sign, folding the
// line's slope into the coefficient and its intercept into the constant.
void pass_activation(Eigen::MatrixXd& lam, Eigen::VectorXd& consts,
                     const std::vector<NeuronRelaxation>& relax,
                     Direction direction) {
  const Eigen::Index n = lam.cols();
  if (static_cast<Eigen::Index>(relax.size()) != n)
    throw std::invalid_argument(
        "backward_substitute: relaxation count does not match layer width");

  Eigen::ArrayXd alpha_lower(n), beta_lower(n), alpha_upper(n), beta_upper(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    alpha_lower(j) = relax[j].lower.slope;
    beta_lower(j) = relax[j].lower.intercept;
    alpha_upper(j) = relax[j].upper.slope;
    beta_upper(j) = relax[j].upper.intercept;
  }

  // Lower bound: nonnegative coefficients take the lower line; mirrored for
  // Upper. A zero coefficient takes the lower line in both directions.
  Eigen::ArrayXXd pick_lower;
  if (direction == Direction::Lower)
    pick_lower = (lam.array() >= 0.0).cast<double>();
  else
    pick_lower = (lam.array() <= 0.0).cast<double>();

  const Eigen::Index rows = lam.rows();
  Eigen::ArrayXXd alpha_sel =
      pick_lower * alpha_lower.transpose().replicate(rows, 1) +
      (1.0 - pick_lower) * alpha_upper.transpose().replicate(rows, 1);
  Eigen::ArrayXXd beta_sel =
      pick_lower * beta_lower.transpose().replicate(rows, 1) +
      (1.0 - pick_lower) * beta_upper.transpose().replicate(rows, 1);

  consts.array() += (lam.array() * beta_sel).rowwise().sum();
  lam.array() *= alpha_sel;
}

const std::vector<NeuronRelaxation>& relaxation_for(
    const std::vector<std::vector<NeuronRelaxation>>& relaxations,
    Eigen::Index layer) {
  if (layer >= static_cast<Eigen::Index>(relaxations.size()) ||
      relaxations[static_cast<std::size_t>(layer)].empty())
    throw std::invalid_argument(
        "backward_substitute: missing relaxation for layer " +
        std::to_string(layer));
  return relaxations[static_cast<std::size_t>(layer)];
}

// Fold layers start..0 into the given linear forms over the start layer's
// pre-activations (or post-activations when include_start_activation).
LayerSymbolic substitute(
    const Network& net,
    const std::vector<std::vector<NeuronRelaxation>>& relaxations,
    Eigen::Index start, bool include_start_activation, Eigen::MatrixXd lam,
    Direction direction) {
  Eigen::VectorXd consts = Eigen::VectorXd::Zero(lam.rows());

  if (include_start_activation &&
      net.layers[static_cast<std::size_t>(start)].activation !=
          ActivationKind::Identity)
    pass_activation(lam, consts, relaxation_for(relaxations, start),
                    direction);

  for (Eigen::Index i = start; i >= 0; --i) {
    const AffineLayer& layer = net.layers[static_cast<std::size_t>(i)];
    if (lam.cols() != layer.out_dim())
      throw std::invalid_argument("backward_substitute: dimension mismatch");
    consts.noalias() += lam * layer.bias;
    lam = lam * layer.weights;
    if (i == 0) break;
    const AffineLayer& prev = net.layers[static_cast<std::size_t>(i - 1)];
    if (prev.activation != ActivationKind::Identity)
      pass_activation(lam, consts, relaxation_for(relaxations, i - 1),
                      direction);
  }
  return {std::move(lam), std::move(consts)};
}

}  // namespace

LayerSymbolic backward_substitute_layer(
    const Network& net,
    const std::vector<std::vector<NeuronRelaxation>>& relaxations,
    Eigen::Index layer, Direction direction, bool post_activation) {
  if (layer < 0 || layer >= net.num_layers())
    throw std::invalid_argument("backward_substitute: layer out of range");
  const Eigen::Index width =
      net.layers[static_cast<std::size_t>(layer)].out_dim();
  return substitute(net, relaxations, layer, post_activation,
                    Eigen::MatrixXd::Identity(width, width), direction);
}

SymbolicBound backward_substitute(
    const Network& net,
    const std::vector<std::vector<NeuronRelaxation>>& relaxations,
    const BoundTarget& target, Direction direction) {
  if (target.layer < 0 || target.layer >= net.num_layers())
    throw std::invalid_argument("backward_substitute: layer out of range");
  const Eigen::Index width =
      net.layers[static_cast<std::size_t>(target.layer)].out_dim();
  if (target.neuron < 0 || target.neuron >= width)
    throw std::invalid_argument("backward_substitute: neuron out of range");

  Eigen::MatrixXd row = Eigen::MatrixXd::Zero(1, width);
  row(0, target.neuron) = 1.0;
  LayerSymbolic sym = substitute(net, relaxations, target.layer,
                                 target.post_activation, std::move(row),
                                 direction);
  return {sym.coeffs.row(0).transpose(), sym.constants(0), direction};
}

double concretize(const SymbolicBound& bound, const InputRegion& region) {
  if (bound.coeffs.size() != region.center.size())
    throw std::invalid_argument("concretize: dimension mismatch");
  const double nominal = bound.coeffs.dot(region.center) + bound.constant;
  const double spread = region.radius * bound.coeffs.lpNorm<1>();
  return bound.direction == Direction::Lower ? nominal - spread
                                             : nominal + spread;
}

BoundArtifacts compute_preactivation_bounds(const Network& net,
                                            const InputRegion& region,
                                            const TangentStrategy& strategy) {
  validate_network(net);
  if (region.center.size() != net.input_dim())
    throw std::invalid_argument("region centre dim does not match network");
  if (region.radius < 0)
    throw std::invalid_argument("region radius must be nonnegative");

  const std::size_t n_layers = net.layers.size();
  BoundArtifacts artifacts;
  artifacts.layer_bounds.resize(n_layers);
  artifacts.relaxations.resize(n_layers);

  for (std::size_t i = 0; i < n_layers; ++i) {
    const Eigen::Index idx = static_cast<Eigen::Index>(i);
    const LayerSymbolic lo = backward_substitute_layer(
        net, artifacts.relaxations, idx, Direction::Lower);
    const LayerSymbolic up = backward_substitute_layer(
        net, artifacts.relaxations, idx, Direction::Upper);

    Eigen::VectorXd spread_lo =
        region.radius * lo.coeffs.cwiseAbs().rowwise().sum();
    Eigen::VectorXd spread_up =
        region.radius * up.coeffs.cwiseAbs().rowwise().sum();
    Eigen::VectorXd l = lo.coeffs * region.center + lo.constants - spread_lo;
    Eigen::VectorXd u = up.coeffs * region.center + up.constants + spread_up;

    // crossings can only be float noise; the two passes sandwich the truth
    if ((l - u).maxCoeff() > 1e-9)
      throw std::logic_error("pre-activation bounds crossed");
    u = u.cwiseMax(l);
    artifacts.layer_bounds[i] = {l, u};

    const ActivationKind kind = net.layers[i].activation;
    if (kind == ActivationKind::Identity) continue;
    std::vector<NeuronRelaxation>& relax = artifacts.relaxations[i];
    relax.reserve(static_cast<std::size_t>(l.size()));
    for (Eigen::Index j = 0; j < l.size(); ++j) {
      const TangentChoice choice = strategy(kind, l(j), u(j));
      relax.push_back(relax_neuron(kind, l(j), u(j), choice.lower,
                                   choice.upper));
    }
  }
  return artifacts;
}

GlobalBoundResult global_lower_bound(const Network& net_with_margin,
                                     const InputRegion& region,
                                     const TangentStrategy& strategy) {
  if (net_with_margin.output_dim() != 1)
    throw std::invalid_argument("global_lower_bound: output dim must be 1");

  GlobalBoundResult result;
  result.artifacts =
      compute_preactivation_bounds(net_with_margin, region, strategy);
  BoundTarget output{net_with_margin.num_layers() - 1, 0,
                     /*post_activation=*/true};
  result.bound = backward_substitute(net_with_margin, result.artifacts.relaxations,
                                     output, Direction::Lower);
  result.g_star = concretize(result.bound, region);
  return result;
}

}  // namespace sigbound
