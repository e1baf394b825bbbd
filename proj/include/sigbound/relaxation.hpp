#pragma once

#include <optional>

#include "sigbound/model.hpp"

namespace sigbound {

/// Line h(z) = slope * z + intercept serving as an activation bound.
struct BoundingLine {
  double slope = 0.0;
  double intercept = 0.0;

  double operator()(double z) const { return slope * z + intercept; }
};

/// Sign pattern of the pre-activation interval: both nonnegative, both
/// nonpositive, or straddling zero.
enum class ActivationCase { SPlus, SMinus, SMixed };

enum class BoundSide { Lower, Upper };

/// Linear sandwich of one activation over its pre-activation interval.
/// Tangent abscissae are recorded when a side was built from a tangent line.
struct NeuronRelaxation {
  BoundingLine lower;
  BoundingLine upper;
  ActivationCase case_tag = ActivationCase::SPlus;
  double pre_lower = 0.0;
  double pre_upper = 0.0;
  std::optional<double> tangent_lower;
  std::optional<double> tangent_upper;
};

/// Tangent abscissae a strategy picks for one neuron; absent sides fall back
/// to the chord rule of the neuron's case.
struct TangentChoice {
  std::optional<double> lower;
  std::optional<double> upper;
};

/// A line passes a validity check when its worst signed gap at the checked
/// points stays above -kValidityTol; absorbs rounding at tangency points.
inline constexpr double kValidityTol = 1e-12;

double sigma(ActivationKind kind, double x);
double sigma_prime(ActivationKind kind, double x);

/// Boundary interval rule: l = 0 goes to SPlus, u = 0 to SMinus.
ActivationCase classify_case(double l, double u);

/// Secant through (l, sigma(l)) and (u, sigma(u)); constant line when l = u.
BoundingLine chord_line(ActivationKind kind, double l, double u);

BoundingLine tangent_line(ActivationKind kind, double d);

/// True iff line(z) >= sigma(z) on [l, u], for a line tangent at some d >= 0.
/// Over the concave region validity is automatic; over the convex region the
/// gap line - sigma is concave, so the endpoint values l and min(u, 0) decide.
bool check_upper_valid(ActivationKind kind, const BoundingLine& line, double l,
                       double u, double tol = kValidityTol);

/// Mirror image: line tangent at some d <= 0, checked at u and max(l, 0).
bool check_lower_valid(ActivationKind kind, const BoundingLine& line, double l,
                       double u, double tol = kValidityTol);

/// Case-dispatched bounding rules. SPlus: tangent upper + chord lower.
/// SMinus: chord upper + tangent lower. SMixed: tangent on both sides.
/// Supplied tangents must carry the right sign and pass the validity checks.
NeuronRelaxation relax_neuron(ActivationKind kind, double l, double u,
                              std::optional<double> tangent_lower,
                              std::optional<double> tangent_upper);

}  // namespace sigbound
