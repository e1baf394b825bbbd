#pragma once

#include <memory>
#include <random>

#include "sigbound/propagation.hpp"

namespace sigbound {

/// One evaluated configuration and its cost c = -g*.
struct Observation {
  SearchConfig config;
  double cost = 0.0;
};

/// Axis-aligned box over (s_upper, psi_upper, s_lower, psi_lower).
struct SearchSpace {
  Eigen::Vector4d lo{0.01, 1.01, -2.0, 1.01};
  Eigen::Vector4d hi{2.0, 3.0, -0.01, 3.0};

  bool contains(const SearchConfig& config) const;
  SearchConfig sample(std::mt19937_64& rng) const;
  SearchConfig clip(const SearchConfig& config) const;
};

Eigen::Vector4d to_vector(const SearchConfig& config);
SearchConfig from_vector(const Eigen::Vector4d& v);

/// Random-forest regressor over the 4-d configuration space. Mean is the
/// across-tree average, variance the across-tree spread.
class SurrogateModel {
 public:
  struct Prediction {
    double mean = 0.0;
    double variance = 0.0;
  };

  SurrogateModel() = default;

  static SurrogateModel fit(const std::vector<Observation>& history,
                            std::uint64_t seed, int num_trees = 10);

  Prediction predict(const SearchConfig& config) const;
  bool fitted() const { return !trees_.empty(); }

 private:
  struct Node {
    int split_dim = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };
  struct Tree {
    std::vector<Node> nodes;
    double predict(const Eigen::Vector4d& x) const;
  };

  std::vector<Tree> trees_;
};

/// Incumbent of a finished configuration run plus the full trial history.
struct ConfiguratorResult {
  SearchConfig best_config;
  double best_cost = 0.0;
  std::vector<Observation> history;
  double g_star = 0.0;  // -best_cost
};

/// Cost recorded for evaluations whose tangent search exhausted its budget.
inline constexpr double kPenaltyCost = 1e6;

/// Run one propagation pass with the multiplicative search parameterized by
/// the config; budget exhaustion yields the penalty cost instead of throwing.
Observation evaluate_config(const Network& net_with_margin,
                            const InputRegion& region,
                            const SearchConfig& config);

SurrogateModel fit_surrogate(const std::vector<Observation>& history,
                             std::uint64_t seed);

/// Expected improvement below best_cost (minimization form), always >= 0.
/// With zero spread this degenerates to max(best_cost - mean, 0).
double expected_improvement(double mean, double stddev, double best_cost);
double expected_improvement(const SurrogateModel& model,
                            const SearchConfig& config, double best_cost);

/// EI argmax over 1000 uniform candidates plus 100 Gaussian perturbations of
/// the incumbent (std 10% of each range, clipped); ties keep the first.
SearchConfig propose_next(const SurrogateModel& model,
                          const std::vector<Observation>& history,
                          const SearchSpace& space, std::mt19937_64& rng);

/// Sequential model-based optimization: n_init uniform trials, then
/// fit / propose / evaluate until n_max total evaluations.
ConfiguratorResult configure(const Network& net_with_margin,
                             const InputRegion& region,
                             const SearchSpace& space, int n_max, int n_init,
                             std::uint64_t seed);

}  // namespace sigbound
