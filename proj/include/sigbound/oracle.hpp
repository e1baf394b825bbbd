#pragma once

#include "sigbound/propagation.hpp"

namespace sigbound {

// Brute-force checkers, written independently of the propagation engine so
// that a disagreement localizes the bug.

/// Comparison of an engine value against an independently computed reference.
struct OracleReport {
  std::string quantity;
  double oracle_value = 0.0;
  double engine_value = 0.0;
  double margin = 0.0;  // oracle - engine
  bool pass = false;
};

/// pass <=> engine <= oracle + tol (the engine claims a lower bound).
OracleReport check_lower_bound(const std::string& quantity,
                               double oracle_value, double engine_value,
                               double tol);

/// Minimum of the scalar network output over n uniform samples of the region
/// plus the centre, the 2*dim axis-extreme points, and (for dim <= 12) all
/// corners. Always an upper bound on the true minimum.
double sampled_min(const Network& net_with_margin, const InputRegion& region,
                   int n_samples, std::uint64_t seed);

/// Minimum over the full tensor grid, endpoints included. Input dim <= 3.
double grid_min(const Network& net_with_margin, const InputRegion& region,
                int points_per_dim);

struct ValidityReport {
  bool valid = false;
  double worst_gap = 0.0;  // min signed gap over the grid
};

/// Activation values on a fixed grid over [l, u], reusable across many lines.
struct ValidityGrid {
  Eigen::ArrayXd zs;
  Eigen::ArrayXd sig;

  ValidityGrid(ActivationKind kind, double l, double u, int n_points);
  /// Upper side gap is line - sigma, lower side sigma - line.
  double worst_gap(BoundSide side, const BoundingLine& line) const;
};

/// Sandwich check of one line on an n-point uniform grid including endpoints.
ValidityReport dense_validity(ActivationKind kind, BoundSide side,
                              const BoundingLine& line, double l, double u,
                              int n_points, double tol = kValidityTol);

/// Naive interval arithmetic through the network: |W|-split affine images
/// and monotone activation images. Sound by construction.
std::vector<LayerBounds> interval_bounds(const Network& net,
                                         const InputRegion& region);

}  // namespace sigbound
