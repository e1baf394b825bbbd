#pragma once

#include <map>
#include <optional>

#include "sigbound/configurator.hpp"

namespace sigbound {

/// Tangent point a relaxation actually used, tagged by its location.
struct TangentRecord {
  Eigen::Index layer = 0;
  Eigen::Index neuron = 0;
  BoundSide side = BoundSide::Upper;
  double value = 0.0;
};

struct VerifyMode {
  enum class Kind { Baseline, Configured };
  Kind kind = Kind::Baseline;
  int n_max = 150;
  int n_init = 10;
  std::uint64_t seed = 0;

  static VerifyMode baseline() { return {}; }
  static VerifyMode configured(int n_max = 150, std::uint64_t seed = 0,
                               int n_init = 10) {
    return {Kind::Configured, n_max, n_init, seed};
  }
};

/// Result of one robustness query. certified <=> g_star >= 0; g_star is the
/// minimum margin bound over all competing labels. Tangent records come from
/// the run of the minimizing label.
struct VerificationOutcome {
  std::map<Eigen::Index, double> per_label_g_star;
  double g_star = 0.0;
  bool certified = false;
  bool label_mismatch = false;  // clean prediction differs from y0
  std::vector<TangentRecord> tangent_records;
  std::optional<ConfiguratorResult> config_used;
  double wall_seconds = 0.0;
  std::string mode;  // "baseline" or "configured"
};

std::vector<TangentRecord> extract_tangent_records(
    const BoundArtifacts& artifacts);

/// Build a margin network per competing label, bound each margin over the
/// epsilon-ball, and certify when every bound is nonnegative. Configured mode
/// runs one configuration per label.
VerificationOutcome verify_instance(const Network& net,
                                    const Eigen::VectorXd& x0,
                                    Eigen::Index y0, double epsilon,
                                    const VerifyMode& mode);

/// Flat row for distribution analysis of tangent points.
struct TangentRow {
  Eigen::Index layer = 0;
  BoundSide side = BoundSide::Upper;
  double value = 0.0;
  std::string mode;
};

std::vector<TangentRow> collect_tangent_distribution(
    const std::vector<VerificationOutcome>& outcomes);

}  // namespace sigbound
