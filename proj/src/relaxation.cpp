#include "sigbound/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sigbound {

double sigma(ActivationKind kind, double x) {
  switch (kind) {
    case ActivationKind::Sigmoid:
      // split by sign to avoid overflow in exp
      if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
      {
        const double e = std::exp(x);
        return e / (1.0 + e);
      }
    case ActivationKind::Tanh:
      return std::tanh(x);
    case ActivationKind::Identity:
      break;
  }
  throw std::invalid_argument("sigma: Identity has no sigmoidal shape");
}

double sigma_prime(ActivationKind kind, double x) {
  switch (kind) {
    case ActivationKind::Sigmoid: {
      const double s = sigma(ActivationKind::Sigmoid, x);
      return s * (1.0 - s);
    }
    case ActivationKind::Tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case ActivationKind::Identity:
      break;
  }
  throw std::invalid_argument("sigma_prime: Identity has no sigmoidal shape");
}

ActivationCase classify_case(double l, double u) {
  if (l > u) throw std::invalid_argument("classify_case: l > u");
  if (l >= 0) return ActivationCase::SPlus;
  if (u <= 0) return ActivationCase::SMinus;
  return ActivationCase::SMixed;
}

BoundingLine chord_line(ActivationKind kind, double l, double u) {
  if (l > u) throw std::invalid_argument("chord_line: l > u");
  if (l == u) return {0.0, sigma(kind, l)};
  const double sl = sigma(kind, l);
  const double su = sigma(kind, u);
  const double slope = (su - sl) / (u - l);
  return {slope, sl - slope * l};
}

BoundingLine tangent_line(ActivationKind kind, double d) {
  const double slope = sigma_prime(kind, d);
  return {slope, sigma(kind, d) - slope * d};
}

bool check_upper_valid(ActivationKind kind, const BoundingLine& line, double l,
                       double u, double tol) {
  if (l > u) throw std::invalid_argument("check_upper_valid: l > u");
  const double z2 = std::min(u, 0.0);
  const double gap_l = line(l) - sigma(kind, l);
  const double gap_z2 = line(z2) - sigma(kind, z2);
  return std::min(gap_l, gap_z2) >= -tol;
}

bool check_lower_valid(ActivationKind kind, const BoundingLine& line, double l,
                       double u, double tol) {
  if (l > u) throw std::invalid_argument("check_lower_valid: l > u");
  const double z2 = std::max(l, 0.0);
  const double gap_u = sigma(kind, u) - line(u);
  const double gap_z2 = sigma(kind, z2) - line(z2);
  return std::min(gap_u, gap_z2) >= -tol;
}

namespace {

double require_upper_tangent(ActivationKind kind, double l, double u,
                             std::optional<double> tangent) {
  if (!tangent)
    throw std::invalid_argument("relax_neuron: upper tangent required");
  if (*tangent < 0)
    throw std::invalid_argument("relax_neuron: upper tangent must be >= 0");
  if (!check_upper_valid(kind, tangent_line(kind, *tangent), l, u))
    throw std::invalid_argument("relax_neuron: invalid upper tangent " +
                                std::to_string(*tangent));
  return *tangent;
}

double require_lower_tangent(ActivationKind kind, double l, double u,
                             std::optional<double> tangent) {
  if (!tangent)
    throw std::invalid_argument("relax_neuron: lower tangent required");
  if (*tangent > 0)
    throw std::invalid_argument("relax_neuron: lower tangent must be <= 0");
  if (!check_lower_valid(kind, tangent_line(kind, *tangent), l, u))
    throw std::invalid_argument("relax_neuron: invalid lower tangent " +
                                std::to_string(*tangent));
  return *tangent;
}

}  // namespace

NeuronRelaxation relax_neuron(ActivationKind kind, double l, double u,
                              std::optional<double> tangent_lower,
                              std::optional<double> tangent_upper) {
  if (l > u) throw std::invalid_argument("relax_neuron: l > u");

  NeuronRelaxation r;
  r.pre_lower = l;
  r.pre_upper = u;
  r.case_tag = classify_case(l, u);

  if (l == u) {
    // point interval: both sides collapse to the constant value
    const BoundingLine constant{0.0, sigma(kind, l)};
    r.lower = constant;
    r.upper = constant;
    return r;
  }

  switch (r.case_tag) {
    case ActivationCase::SPlus: {
      const double d = require_upper_tangent(kind, l, u, tangent_upper);
      r.upper = tangent_line(kind, d);
      r.tangent_upper = d;
      r.lower = chord_line(kind, l, u);
      break;
    }
    case ActivationCase::SMinus: {
      const double d = require_lower_tangent(kind, l, u, tangent_lower);
      r.lower = tangent_line(kind, d);
      r.tangent_lower = d;
      r.upper = chord_line(kind, l, u);
      break;
    }
    case ActivationCase::SMixed: {
      const double du = require_upper_tangent(kind, l, u, tangent_upper);
      const double dl = require_lower_tangent(kind, l, u, tangent_lower);
      r.upper = tangent_line(kind, du);
      r.tangent_upper = du;
      r.lower = tangent_line(kind, dl);
      r.tangent_lower = dl;
      break;
    }
  }
  return r;
}

}  // namespace sigbound
