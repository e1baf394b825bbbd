#include "sigbound/configurator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sigbound {

Eigen::Vector4d to_vector(const SearchConfig& config) {
  return {config.s_upper, config.psi_upper, config.s_lower, config.psi_lower};
}

SearchConfig from_vector(const Eigen::Vector4d& v) {
  return {v(0), v(1), v(2), v(3)};
}

bool SearchSpace::contains(const SearchConfig& config) const {
  const Eigen::Vector4d v = to_vector(config);
  return (v.array() >= lo.array()).all() && (v.array() <= hi.array()).all();
}

SearchConfig SearchSpace::sample(std::mt19937_64& rng) const {
  Eigen::Vector4d v;
  for (int i = 0; i < 4; ++i) {
    std::uniform_real_distribution<double> dist(lo(i), hi(i));
    v(i) = dist(rng);
  }
  return from_vector(v);
}

SearchConfig SearchSpace::clip(const SearchConfig& config) const {
  Eigen::Vector4d v = to_vector(config);
  v = v.cwiseMax(lo).cwiseMin(hi);
  return from_vector(v);
}

namespace {

struct TrainingSet {
  std::vector<Eigen::Vector4d> x;
  std::vector<double> y;
};

constexpr std::size_t kSplitDims = 2;  // dimensions tried per node
constexpr std::size_t kMinSplit = 2;   // smallest node worth splitting

}  // namespace

double SurrogateModel::Tree::predict(const Eigen::Vector4d& x) const {
  int idx = 0;
  while (nodes[static_cast<std::size_t>(idx)].split_dim >= 0) {
    const Node& node = nodes[static_cast<std::size_t>(idx)];
    idx = x(node.split_dim) <= node.threshold ? node.left : node.right;
  }
  return nodes[static_cast<std::size_t>(idx)].value;
}

// CART-style regression trees on bootstrap samples; split quality is the
// reduction in summed squared error, thresholds are midpoints between
// adjacent distinct values along a randomly chosen dimension subset.
SurrogateModel SurrogateModel::fit(const std::vector<Observation>& history,
                                   std::uint64_t seed, int num_trees) {
  if (history.empty())
    throw std::invalid_argument("fit_surrogate: empty history");

  TrainingSet data;
  data.x.reserve(history.size());
  data.y.reserve(history.size());
  for (const Observation& obs : history) {
    data.x.push_back(to_vector(obs.config));
    data.y.push_back(obs.cost);
  }
  const std::size_t n = data.x.size();

  SurrogateModel model;
  model.trees_.resize(static_cast<std::size_t>(num_trees));

  for (int t = 0; t < num_trees; ++t) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL *
                                   static_cast<std::uint64_t>(t + 1));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> sample(n);
    for (std::size_t i = 0; i < n; ++i) sample[i] = pick(rng);

    Tree& tree = model.trees_[static_cast<std::size_t>(t)];

    // recursive builder over index ranges of `sample`
    auto build = [&](auto&& self, std::vector<std::size_t> idx) -> int {
      const int node_id = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();

      double sum = 0.0;
      for (std::size_t i : idx) sum += data.y[i];
      const double mean = sum / static_cast<double>(idx.size());

      bool constant = true;
      for (std::size_t i : idx)
        if (data.y[i] != data.y[idx.front()]) {
          constant = false;
          break;
        }
      if (idx.size() < kMinSplit || constant) {
        tree.nodes[static_cast<std::size_t>(node_id)].value = mean;
        return node_id;
      }

      std::array<int, 4> dims{0, 1, 2, 3};
      std::shuffle(dims.begin(), dims.end(), rng);

      int best_dim = -1;
      double best_threshold = 0.0;
      double best_sse = std::numeric_limits<double>::infinity();
      const double total_sq = [&] {
        double s = 0.0;
        for (std::size_t i : idx) s += data.y[i] * data.y[i];
        return s;
      }();
      const double parent_sse =
          total_sq - sum * sum / static_cast<double>(idx.size());

      for (std::size_t k = 0; k < kSplitDims; ++k) {
        const int dim = dims[k];
        std::vector<std::size_t> order = idx;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) {
                    if (data.x[a](dim) != data.x[b](dim))
                      return data.x[a](dim) < data.x[b](dim);
                    return a < b;
                  });
        double left_sum = 0.0, left_sq = 0.0;
        for (std::size_t p = 0; p + 1 < order.size(); ++p) {
          const double y = data.y[order[p]];
          left_sum += y;
          left_sq += y * y;
          const double v = data.x[order[p]](dim);
          const double v_next = data.x[order[p + 1]](dim);
          if (v == v_next) continue;
          const double nl = static_cast<double>(p + 1);
          const double nr = static_cast<double>(order.size() - p - 1);
          const double right_sum = sum - left_sum;
          const double right_sq = total_sq - left_sq;
          const double sse = (left_sq - left_sum * left_sum / nl) +
                             (right_sq - right_sum * right_sum / nr);
          if (sse < best_sse) {
            best_sse = sse;
            best_dim = dim;
            best_threshold = 0.5 * (v + v_next);
          }
        }
      }

      if (best_dim < 0 || best_sse >= parent_sse) {
        tree.nodes[static_cast<std::size_t>(node_id)].value = mean;
        return node_id;
      }

      std::vector<std::size_t> left, right;
      for (std::size_t i : idx)
        (data.x[i](best_dim) <= best_threshold ? left : right).push_back(i);
      if (left.empty() || right.empty()) {
        tree.nodes[static_cast<std::size_t>(node_id)].value = mean;
        return node_id;
      }

      const int left_id = self(self, std::move(left));
      const int right_id = self(self, std::move(right));
      Node& node = tree.nodes[static_cast<std::size_t>(node_id)];
      node.split_dim = best_dim;
      node.threshold = best_threshold;
      node.left = left_id;
      node.right = right_id;
      return node_id;
    };

    build(build, std::move(sample));
  }
  return model;
}

SurrogateModel::Prediction SurrogateModel::predict(
    const SearchConfig& config) const {
  if (trees_.empty())
    throw std::logic_error("SurrogateModel::predict before fit");
  const Eigen::Vector4d x = to_vector(config);
  double mean = 0.0;
  std::vector<double> preds;
  preds.reserve(trees_.size());
  for (const Tree& tree : trees_) {
    const double p = tree.predict(x);
    preds.push_back(p);
    mean += p;
  }
  mean /= static_cast<double>(preds.size());
  double variance = 0.0;
  for (double p : preds) variance += (p - mean) * (p - mean);
  variance /= static_cast<double>(preds.size());
  return {mean, variance};
}

Observation evaluate_config(const Network& net_with_margin,
                            const InputRegion& region,
                            const SearchConfig& config) {
  try {
    const GlobalBoundResult result =
        global_lower_bound(net_with_margin, region, configured_strategy(config));
    return {config, -result.g_star};
  } catch (const SearchBudgetError&) {
    return {config, kPenaltyCost};
  }
}

SurrogateModel fit_surrogate(const std::vector<Observation>& history,
                             std::uint64_t seed) {
  return SurrogateModel::fit(history, seed);
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

}  // namespace

double expected_improvement(double mean, double stddev, double best_cost) {
  const double gain = best_cost - mean;
  if (stddev < 1e-12) return std::max(gain, 0.0);
  const double z = gain / stddev;
  return std::max(gain * normal_cdf(z) + stddev * normal_pdf(z), 0.0);
}

double expected_improvement(const SurrogateModel& model,
                            const SearchConfig& config, double best_cost) {
  const SurrogateModel::Prediction pred = model.predict(config);
  return expected_improvement(pred.mean,
                              std::sqrt(std::max(pred.variance, 0.0)),
                              best_cost);
}

SearchConfig propose_next(const SurrogateModel& model,
                          const std::vector<Observation>& history,
                          const SearchSpace& space, std::mt19937_64& rng) {
  if (history.empty())
    throw std::invalid_argument("propose_next: empty history");

  double best_cost = history.front().cost;
  SearchConfig incumbent = history.front().config;
  for (const Observation& obs : history)
    if (obs.cost < best_cost) {
      best_cost = obs.cost;
      incumbent = obs.config;
    }

  constexpr int kUniform = 1000;
  constexpr int kLocal = 100;
  const Eigen::Vector4d center = to_vector(incumbent);
  const Eigen::Vector4d sigma = 0.1 * (space.hi - space.lo);

  SearchConfig best_config{};
  double best_ei = -1.0;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < kUniform + kLocal; ++i) {
    SearchConfig candidate;
    if (i < kUniform) {
      candidate = space.sample(rng);
    } else {
      Eigen::Vector4d v;
      for (int dim = 0; dim < 4; ++dim)
        v(dim) = center(dim) + sigma(dim) * gauss(rng);
      candidate = space.clip(from_vector(v));
    }
    const double ei = expected_improvement(model, candidate, best_cost);
    if (ei > best_ei) {
      best_ei = ei;
      best_config = candidate;
    }
  }
  return best_config;
}

ConfiguratorResult configure(const Network& net_with_margin,
                             const InputRegion& region,
                             const SearchSpace& space, int n_max, int n_init,
                             std::uint64_t seed) {
  if (n_init < 1) throw std::invalid_argument("configure: n_init must be >= 1");
  if (n_max < n_init)
    throw std::invalid_argument("configure: n_max must be >= n_init");

  std::mt19937_64 rng(seed);
  ConfiguratorResult result;
  result.best_cost = std::numeric_limits<double>::infinity();
  result.history.reserve(static_cast<std::size_t>(n_max));

  for (int t = 0; t < n_max; ++t) {
    SearchConfig config;
    if (t < n_init) {
      config = space.sample(rng);
    } else {
      const std::uint64_t forest_seed = rng();
      const SurrogateModel model = fit_surrogate(result.history, forest_seed);
      config = propose_next(model, result.history, space, rng);
    }
    const Observation obs = evaluate_config(net_with_margin, region, config);
    result.history.push_back(obs);
    if (obs.cost < result.best_cost) {
      result.best_cost = obs.cost;
      result.best_config = obs.config;
    }
  }
  result.g_star = -result.best_cost;
  return result;
}

}  // namespace sigbound
