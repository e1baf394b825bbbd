#pragma once

#include <functional>
#include <stdexcept>

#include "sigbound/relaxation.hpp"

namespace sigbound {

/// Thrown when a tangent search exhausts its step or bracket budget.
class SearchBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shared hyper-parameters of the multiplicative tangent search: a starting
/// point and a multiplier per bound side, applied to every neuron of the
/// network. psi_lower is a magnitude; lower iterates keep their negative sign.
struct SearchConfig {
  double s_upper = 0.5;
  double psi_upper = 1.5;
  double s_lower = -0.5;
  double psi_lower = 1.5;
};

inline constexpr int kDefaultSearchSteps = 200;

/// First d in s, s*psi, s*psi^2, ... whose tangent line is a valid upper
/// bound on [l, u]. Requires s > 0, psi > 1.
double search_tangent_upper(ActivationKind kind, double l, double u, double s,
                            double psi, int max_steps = kDefaultSearchSteps);

/// Mirror search with s < 0 and |psi| > 1; iterate magnitudes grow while the
/// sign stays negative.
double search_tangent_lower(ActivationKind kind, double l, double u, double s,
                            double psi, int max_steps = kDefaultSearchSteps);

/// Bisection for the tangent point whose line passes through
/// (anchor, sigma(anchor)). Upper side: anchor < 0, result d >= 0 with
/// residual in [0, tol]; lower side: anchor > 0, d <= 0, residual in
/// [-tol, 0]. The bracket is doubled until the residual changes sign.
double binary_search_endpoint_tangent(ActivationKind kind, double anchor,
                                      BoundSide side, double tol);

/// Vanilla tangent rule: interval midpoint for SPlus/SMinus, endpoint-anchored
/// bisection tangents for SMixed.
TangentChoice baseline_tangents(ActivationKind kind, double l, double u);

/// Per-neuron tangent supplier used by the propagation loop.
using TangentStrategy =
    std::function<TangentChoice(ActivationKind, double, double)>;

TangentStrategy baseline_strategy();
TangentStrategy configured_strategy(const SearchConfig& config,
                                    int max_steps = kDefaultSearchSteps);

}  // namespace sigbound
