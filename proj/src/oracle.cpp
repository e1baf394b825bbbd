#include "sigbound/oracle.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace sigbound {

OracleReport check_lower_bound(const std::string& quantity,
                               double oracle_value, double engine_value,
                               double tol) {
  OracleReport report;
  report.quantity = quantity;
  report.oracle_value = oracle_value;
  report.engine_value = engine_value;
  report.margin = oracle_value - engine_value;
  report.pass = engine_value <= oracle_value + tol;
  return report;
}

namespace {

double scalar_output(const Network& net, const Eigen::VectorXd& x) {
  return eval_forward(net, x)(0);
}

}  // namespace

double sampled_min(const Network& net_with_margin, const InputRegion& region,
                   int n_samples, std::uint64_t seed) {
  if (n_samples < 1)
    throw std::invalid_argument("sampled_min: need at least one sample");
  if (net_with_margin.output_dim() != 1)
    throw std::invalid_argument("sampled_min: output dim must be 1");
  const Eigen::Index d = net_with_margin.input_dim();
  if (region.center.size() != d)
    throw std::invalid_argument("sampled_min: dimension mismatch");

  double best = scalar_output(net_with_margin, region.center);

  Eigen::VectorXd x = region.center;
  for (Eigen::Index i = 0; i < d; ++i) {
    x(i) = region.center(i) + region.radius;
    best = std::min(best, scalar_output(net_with_margin, x));
    x(i) = region.center(i) - region.radius;
    best = std::min(best, scalar_output(net_with_margin, x));
    x(i) = region.center(i);
  }

  // full corner set is affordable in low dimension and catches the exact
  // optimum of affine networks
  if (d <= 12) {
    for (std::uint64_t bits = 0; bits < (1ULL << d); ++bits) {
      for (Eigen::Index i = 0; i < d; ++i)
        x(i) = region.center(i) +
               (((bits >> i) & 1ULL) ? region.radius : -region.radius);
      best = std::min(best, scalar_output(net_with_margin, x));
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> offset(-region.radius, region.radius);
  for (int s = 0; s < n_samples; ++s) {
    for (Eigen::Index i = 0; i < d; ++i) x(i) = region.center(i) + offset(rng);
    best = std::min(best, scalar_output(net_with_margin, x));
  }
  return best;
}

double grid_min(const Network& net_with_margin, const InputRegion& region,
                int points_per_dim) {
  const Eigen::Index d = net_with_margin.input_dim();
  if (d > 3) throw std::invalid_argument("grid_min: input dim must be <= 3");
  if (points_per_dim < 2)
    throw std::invalid_argument("grid_min: need at least 2 points per dim");
  if (net_with_margin.output_dim() != 1)
    throw std::invalid_argument("grid_min: output dim must be 1");
  if (region.center.size() != d)
    throw std::invalid_argument("grid_min: dimension mismatch");

  const int p = points_per_dim;
  std::vector<int> index(static_cast<std::size_t>(d), 0);
  Eigen::VectorXd x(d);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const double frac =
          static_cast<double>(index[static_cast<std::size_t>(i)]) /
          static_cast<double>(p - 1);
      x(i) = region.center(i) - region.radius + 2.0 * region.radius * frac;
    }
    best = std::min(best, scalar_output(net_with_margin, x));

    Eigen::Index carry = 0;
    while (carry < d) {
      if (++index[static_cast<std::size_t>(carry)] < p) break;
      index[static_cast<std::size_t>(carry)] = 0;
      ++carry;
    }
    if (carry == d) break;
  }
  return best;
}

ValidityGrid::ValidityGrid(ActivationKind kind, double l, double u,
                           int n_points) {
  if (l > u) throw std::invalid_argument("ValidityGrid: l > u");
  if (n_points < 2)
    throw std::invalid_argument("ValidityGrid: need at least 2 points");
  zs = Eigen::ArrayXd::LinSpaced(n_points, l, u);
  sig = zs.unaryExpr([kind](double z) { return sigma(kind, z); });
}

double ValidityGrid::worst_gap(BoundSide side, const BoundingLine& line) const {
  const Eigen::ArrayXd values = line.slope * zs + line.intercept;
  return side == BoundSide::Upper ? (values - sig).minCoeff()
                                  : (sig - values).minCoeff();
}

ValidityReport dense_validity(ActivationKind kind, BoundSide side,
                              const BoundingLine& line, double l, double u,
                              int n_points, double tol) {
  const ValidityGrid grid(kind, l, u, n_points);
  const double worst = grid.worst_gap(side, line);
  return {worst >= -tol, worst};
}

std::vector<LayerBounds> interval_bounds(const Network& net,
                                         const InputRegion& region) {
  if (region.center.size() != net.input_dim())
    throw std::invalid_argument("interval_bounds: dimension mismatch");

  std::vector<LayerBounds> bounds;
  bounds.reserve(net.layers.size());

  Eigen::VectorXd mid = region.center;
  Eigen::VectorXd rad =
      Eigen::VectorXd::Constant(net.input_dim(), region.radius);

  for (const AffineLayer& layer : net.layers) {
    const Eigen::VectorXd pre_mid = layer.weights * mid + layer.bias;
    const Eigen::VectorXd pre_rad = layer.weights.cwiseAbs() * rad;
    LayerBounds lb{pre_mid - pre_rad, pre_mid + pre_rad};
    bounds.push_back(lb);

    if (layer.activation == ActivationKind::Identity) {
      mid = pre_mid;
      rad = pre_rad;
    } else {
      // monotone activation: image of the interval is [sigma(l), sigma(u)]
      Eigen::VectorXd post_lo = lb.lower.unaryExpr(
          [&](double z) { return sigma(layer.activation, z); });
      Eigen::VectorXd post_hi = lb.upper.unaryExpr(
          [&](double z) { return sigma(layer.activation, z); });
      mid = 0.5 * (post_lo + post_hi);
      rad = 0.5 * (post_hi - post_lo);
    }
  }
  return bounds;
}

}  // namespace sigbound
