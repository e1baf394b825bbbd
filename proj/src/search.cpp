#include "sigbound/search.hpp"

#include <cmath>
#include <string>

namespace sigbound {

double search_tangent_upper(ActivationKind kind, double l, double u, double s,
                            double psi, int max_steps) {
  if (l > u) throw std::invalid_argument("search_tangent_upper: l > u");
  if (s <= 0) throw std::invalid_argument("search_tangent_upper: s must be > 0");
  if (psi <= 1)
    throw std::invalid_argument("search_tangent_upper: psi must be > 1");

  double d = s;
  for (int step = 0; step < max_steps; ++step) {
    if (!std::isfinite(d)) break;
    if (check_upper_valid(kind, tangent_line(kind, d), l, u)) return d;
    d *= psi;
  }
  throw SearchBudgetError("upper tangent search exhausted " +
                          std::to_string(max_steps) + " steps on [" +
                          std::to_string(l) + ", " + std::to_string(u) + "]");
}

double search_tangent_lower(ActivationKind kind, double l, double u, double s,
                            double psi, int max_steps) {
  if (l > u) throw std::invalid_argument("search_tangent_lower: l > u");
  if (s >= 0) throw std::invalid_argument("search_tangent_lower: s must be < 0");
  const double growth = std::abs(psi);
  if (growth <= 1)
    throw std::invalid_argument("search_tangent_lower: |psi| must be > 1");

  // magnitudes grow, sign stays negative
  double d = s;
  for (int step = 0; step < max_steps; ++step) {
    if (!std::isfinite(d)) break;
    if (check_lower_valid(kind, tangent_line(kind, d), l, u)) return d;
    d *= growth;
  }
  throw SearchBudgetError("lower tangent search exhausted " +
                          std::to_string(max_steps) + " steps on [" +
                          std::to_string(l) + ", " + std::to_string(u) + "]");
}

namespace {

// Signed gap between the tangent line at d and the activation at the anchor.
double tangency_residual(ActivationKind kind, double d, double anchor) {
  return sigma_prime(kind, d) * (anchor - d) + sigma(kind, d) -
         sigma(kind, anchor);
}

}  // namespace

double binary_search_endpoint_tangent(ActivationKind kind, double anchor,
                                      BoundSide side, double tol) {
  constexpr double kMaxBracket = 1e6;

  if (side == BoundSide::Upper) {
    if (anchor >= 0)
      throw std::invalid_argument("endpoint tangent: upper side needs l < 0");
    // residual is nondecreasing in d; find the d >= 0 where it turns >= 0
    if (tangency_residual(kind, 0.0, anchor) >= 0) return 0.0;
    double hi = 1.0;
    while (tangency_residual(kind, hi, anchor) < 0) {
      hi *= 2.0;
      if (hi > kMaxBracket)
        throw SearchBudgetError("endpoint tangent: no sign change up to 1e6");
    }
    double lo = 0.0;
    while (tangency_residual(kind, hi, anchor) > tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;  // interval at float resolution
      if (tangency_residual(kind, mid, anchor) >= 0)
        hi = mid;
      else
        lo = mid;
    }
    return hi;
  }

  if (anchor <= 0)
    throw std::invalid_argument("endpoint tangent: lower side needs u > 0");
  // mirror: residual nonincreasing as d goes down from 0
  if (tangency_residual(kind, 0.0, anchor) <= 0) return 0.0;
  double lo = -1.0;
  while (tangency_residual(kind, lo, anchor) > 0) {
    lo *= 2.0;
    if (lo < -kMaxBracket)
      throw SearchBudgetError("endpoint tangent: no sign change up to -1e6");
  }
  double hi = 0.0;
  while (tangency_residual(kind, lo, anchor) < -tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (tangency_residual(kind, mid, anchor) <= 0)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

TangentChoice baseline_tangents(ActivationKind kind, double l, double u) {
  if (l > u) throw std::invalid_argument("baseline_tangents: l > u");
  if (l == u) return {};

  TangentChoice choice;
  switch (classify_case(l, u)) {
    case ActivationCase::SPlus:
      choice.upper = 0.5 * (l + u);
      break;
    case ActivationCase::SMinus:
      choice.lower = 0.5 * (l + u);
      break;
    case ActivationCase::SMixed:
      choice.upper =
          binary_search_endpoint_tangent(kind, l, BoundSide::Upper, 1e-9);
      choice.lower =
          binary_search_endpoint_tangent(kind, u, BoundSide::Lower, 1e-9);
      break;
  }
  return choice;
}

TangentStrategy baseline_strategy() {
  return [](ActivationKind kind, double l, double u) {
    return baseline_tangents(kind, l, u);
  };
}

TangentStrategy configured_strategy(const SearchConfig& config,
                                    int max_steps) {
  return [config, max_steps](ActivationKind kind, double l,
                             double u) -> TangentChoice {
    if (l == u) return {};
    TangentChoice choice;
    switch (classify_case(l, u)) {
      case ActivationCase::SPlus:
        choice.upper = search_tangent_upper(kind, l, u, config.s_upper,
                                            config.psi_upper, max_steps);
        break;
      case ActivationCase::SMinus:
        choice.lower = search_tangent_lower(kind, l, u, config.s_lower,
                                            config.psi_lower, max_steps);
        break;
      case ActivationCase::SMixed:
        choice.upper = search_tangent_upper(kind, l, u, config.s_upper,
                                            config.psi_upper, max_steps);
        choice.lower = search_tangent_lower(kind, l, u, config.s_lower,
                                            config.psi_lower, max_steps);
        break;
    }
    return choice;
  };
}

}  // namespace sigbound
