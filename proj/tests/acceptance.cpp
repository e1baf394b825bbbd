// Acceptance suite: every criterion prints one pass/fail line and the binary
// exits with the number of failures. --criterion N runs a single one.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "sigbound/benchmark.hpp"
#include "sigbound/oracle.hpp"

using namespace sigbound;

namespace {

struct Criterion {
  int id;
  std::string summary;
  bool passed = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      passed = false;
      if (detail.tellp() < 2000) detail << "    failed: " << what << "\n";
    }
  }
};

ActivationKind flip(int i) {
  return i % 2 == 0 ? ActivationKind::Sigmoid : ActivationKind::Tanh;
}

// ---------------------------------------------------------------- criterion 1
void relaxation_soundness(Criterion& c) {
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> span(-10.0, 10.0);
  std::uniform_real_distribution<double> ss(0.01, 2.0);
  std::uniform_real_distribution<double> psis(1.01, 3.0);

  std::vector<SearchConfig> configs;
  for (int i = 0; i < 100; ++i)
    configs.push_back({ss(rng), psis(rng), -ss(rng), psis(rng)});

  long checked = 0, exhausted = 0;
  for (int trial = 0; trial < 10000 && c.passed; ++trial) {
    double l = span(rng), u = span(rng);
    if (l > u) std::swap(l, u);
    const ActivationKind kind = flip(trial);
    const ValidityGrid grid(kind, l, u, 1000);

    const auto check = [&](const NeuronRelaxation& r) {
      c.require(grid.worst_gap(BoundSide::Lower, r.lower) >= -1e-10,
                "lower line leak");
      c.require(grid.worst_gap(BoundSide::Upper, r.upper) >= -1e-10,
                "upper line leak");
      ++checked;
    };

    const TangentChoice base = baseline_tangents(kind, l, u);
    check(relax_neuron(kind, l, u, base.lower, base.upper));

    const ActivationCase tag = classify_case(l, u);
    for (const SearchConfig& config : configs) {
      if (l == u) break;
      try {
        TangentChoice choice;
        if (tag != ActivationCase::SMinus)
          choice.upper = search_tangent_upper(kind, l, u, config.s_upper,
                                              config.psi_upper);
        if (tag != ActivationCase::SPlus)
          choice.lower = search_tangent_lower(kind, l, u, config.s_lower,
                                              config.psi_lower);
        check(relax_neuron(kind, l, u, choice.lower, choice.upper));
      } catch (const SearchBudgetError&) {
        ++exhausted;  // no relaxation produced; nothing to check
      }
    }
  }
  c.detail << "    " << checked << " relaxations checked, " << exhausted
           << " searches exhausted their budget\n";
  c.require(checked > 500000, "too few relaxations exercised");
}

// ---------------------------------------------------------------- criterion 2
void validity_equivalence(Criterion& c) {
  std::mt19937_64 rng(1002);
  std::uniform_real_distribution<double> span(-10.0, 10.0);
  std::uniform_real_distribution<double> ds(0.0, 12.0);

  for (int trial = 0; trial < 10000; ++trial) {
    double l = span(rng), u = span(rng);
    if (l > u) std::swap(l, u);
    const ActivationKind kind = flip(trial);
    const double d = ds(rng);

    const BoundingLine upper = tangent_line(kind, d);
    const bool analytic_up = check_upper_valid(kind, upper, l, u, 1e-10);
    const bool dense_up =
        dense_validity(kind, BoundSide::Upper, upper, l, u, 1000, 1e-10).valid;
    c.require(analytic_up == dense_up, "upper disagreement");

    const BoundingLine lower = tangent_line(kind, -d);
    const bool analytic_lo = check_lower_valid(kind, lower, l, u, 1e-10);
    const bool dense_lo =
        dense_validity(kind, BoundSide::Lower, lower, l, u, 1000, 1e-10).valid;
    c.require(analytic_lo == dense_lo, "lower disagreement");
  }
}

// ---------------------------------------------------------------- criterion 3
std::vector<Network> seeded_margin_nets(int count) {
  const std::vector<std::vector<Eigen::Index>> shapes{
      {1, 1},       {1, 3, 1},    {2, 4, 2},    {2, 5, 3, 2},
      {3, 6, 4, 2}, {4, 8, 8, 3}, {2, 8, 2},    {3, 5, 5, 3},
      {1, 4, 4, 1}, {2, 6, 1}};
  std::vector<Network> nets;
  for (int i = 0; i < count; ++i) {
    const auto& shape = shapes[static_cast<std::size_t>(i) % shapes.size()];
    RandomNetworkSpec spec{shape, flip(i), 1.2, true};
    Network net = gen_random_network(spec, 9000 + static_cast<std::uint64_t>(i));
    if (net.output_dim() == 1) {
      nets.push_back(std::move(net));
    } else {
      nets.push_back(append_margin_layer(net, 0, 1));
    }
  }
  return nets;
}

void global_soundness(Criterion& c) {
  const std::vector<Network> nets = seeded_margin_nets(50);
  std::mt19937_64 rng(1003);
  std::uniform_real_distribution<double> xs(-0.5, 0.5);
  const std::vector<double> epsilons{0.01, 0.05, 0.2, 0.5, 1.0};

  int idx = 0;
  for (const Network& net : nets) {
    Eigen::VectorXd x0(net.input_dim());
    for (Eigen::Index i = 0; i < x0.size(); ++i) x0(i) = xs(rng);
    ++idx;

    for (double eps : epsilons) {
      const InputRegion region{x0, eps};
      const double baseline =
          global_lower_bound(net, region, baseline_strategy()).g_star;
      const double configured =
          configure(net, region, SearchSpace{}, 30, 10,
                    static_cast<std::uint64_t>(idx))
              .g_star;
      const double oracle =
          sampled_min(net, region, 10000, static_cast<std::uint64_t>(idx));
      c.require(baseline <= oracle + 1e-9, "baseline above sampled min");
      c.require(configured <= oracle + 1e-9, "configured above sampled min");

      if (net.input_dim() <= 2) {
        const int points = net.input_dim() == 1 ? 2001 : 201;
        const double grid = grid_min(net, region, points);
        c.require(baseline <= grid + 1e-9, "baseline above grid min");
        c.require(configured <= grid + 1e-9, "configured above grid min");
      }
    }
  }
}

// ---------------------------------------------------------------- criterion 4
void exactness_limits(Criterion& c) {
  const std::vector<Network> nets = seeded_margin_nets(10);
  std::mt19937_64 rng(1004);
  std::uniform_real_distribution<double> xs(-0.5, 0.5);

  for (const Network& net : nets) {
    Eigen::VectorXd x0(net.input_dim());
    for (Eigen::Index i = 0; i < x0.size(); ++i) x0(i) = xs(rng);
    const double g =
        global_lower_bound(net, {x0, 0.0}, baseline_strategy()).g_star;
    c.require(std::abs(g - eval_forward(net, x0)(0)) <= 1e-9,
              "zero-radius bound differs from the forward pass");
  }

  // affine chains: closed-form minimum from the composed map
  std::uniform_real_distribution<double> vals(-2.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index d = 1 + trial % 4;
    const Eigen::Index hidden = 2 + trial % 3;
    Network net;
    Eigen::MatrixXd w0(hidden, d), w1(1, hidden);
    Eigen::VectorXd b0(hidden), b1(1);
    for (Eigen::Index i = 0; i < hidden; ++i) {
      b0(i) = vals(rng);
      for (Eigen::Index j = 0; j < d; ++j) w0(i, j) = vals(rng);
    }
    b1(0) = vals(rng);
    for (Eigen::Index j = 0; j < hidden; ++j) w1(0, j) = vals(rng);
    net.layers.push_back({w0, b0, ActivationKind::Identity});
    net.layers.push_back({w1, b1, ActivationKind::Identity});

    Eigen::VectorXd x0(d);
    for (Eigen::Index i = 0; i < d; ++i) x0(i) = vals(rng);
    const double eps = 0.3 + 0.1 * (trial % 5);

    const Eigen::RowVectorXd w = w1 * w0;
    const double bias = (w1 * b0)(0) + b1(0);
    const double closed_form = w.dot(x0) + bias - eps * w.cwiseAbs().sum();
    const double g =
        global_lower_bound(net, {x0, eps}, baseline_strategy()).g_star;
    c.require(std::abs(g - closed_form) <= 1e-12,
              "affine bound misses the closed form");
  }
}

// ---------------------------------------------------------------- criterion 5
void headline_improvement(Criterion& c) {
  std::mt19937_64 rng(1005);
  std::uniform_real_distribution<double> xs(-0.5, 0.5);

  const std::vector<std::vector<Eigen::Index>> shapes{
      {4, 8, 12, 2}, {3, 16, 8, 2}, {5, 24, 16, 2}, {4, 12, 12, 8, 2},
      {3, 32, 8, 2}, {4, 16, 16, 16, 2}};

  int wins = 0, total = 0;
  double base_mean = 0.0, conf_mean = 0.0, rel_sum = 0.0;
  int rel_n = 0;

  for (int i = 0; i < 50; ++i) {
    const auto& shape = shapes[static_cast<std::size_t>(i) % shapes.size()];
    const Network net = gen_random_network(
        {shape, ActivationKind::Sigmoid, 1.0, true},
        4000 + static_cast<std::uint64_t>(i));

    Eigen::VectorXd x0(net.input_dim());
    for (Eigen::Index k = 0; k < x0.size(); ++k) x0(k) = xs(rng);

    // margin of the predicted label, positive at the centre; looseness then
    // comes from the relaxation, which is the regime the search targets
    Eigen::Index y0 = 0;
    eval_forward(net, x0).maxCoeff(&y0);
    const Network margin = append_margin_layer(net, y0, 1 - y0);

    // grow the radius until the baseline bound goes negative
    double eps = 0.02;
    double baseline = 1.0;
    while (eps <= 64.0) {
      baseline =
          global_lower_bound(margin, {x0, eps}, baseline_strategy()).g_star;
      if (baseline < 0) break;
      eps *= 1.6;
    }
    if (baseline >= 0) continue;  // net too flat at any radius; skip

    const ConfiguratorResult result =
        configure(margin, {x0, eps}, SearchSpace{}, 150, 10,
                  5000 + static_cast<std::uint64_t>(i));

    base_mean += baseline;
    conf_mean += result.g_star;
    if (result.g_star >= baseline - 1e-12) ++wins;
    ++total;
    if (baseline < 0 && result.g_star < 0) {
      rel_sum += baseline / result.g_star - 1.0;
      ++rel_n;
    }
  }

  c.require(total >= 45, "too few instances reached a negative baseline");
  base_mean /= total;
  conf_mean /= total;
  c.detail << "    instances: " << total << ", baseline mean g*: " << base_mean
           << ", configured mean g*: " << conf_mean << "\n";
  c.detail << "    configured >= baseline on " << wins << "/" << total
           << " instances";
  if (rel_n > 0)
    c.detail << ", mean relative improvement "
             << 100.0 * rel_sum / rel_n << "%";
  c.detail << "\n";
  c.require(conf_mean > base_mean, "configured mean not above baseline mean");
  c.require(wins * 5 >= total * 4, "configured wins below the 80% mark");
}

// ---------------------------------------------------------------- criterion 6
void improvement_metric(Criterion& c) {
  struct Row {
    double base, conf;
    int printed;
  };
  const std::vector<Row> rows{
      {-15.611, -5.506, 184}, {-1.727, -1.633, 6},   {-0.709, -0.702, 1},
      {-18.448, -16.433, 12}, {-17.819, -16.234, 10}, {-15.075, -13.478, 12},
      {-6.731, -5.915, 14},   {-5.153, -4.175, 23},   {-9.484, -8.563, 10},
      {-0.110, -0.070, 57},   {-65.849, -55.565, 19}, {-44.504, -33.723, 32},
      {-10.835, -9.348, 16},  {-2.299, -2.259, 2}};
  c.require(rows.size() == 14, "expected 14 applicable rows");
  for (const Row& row : rows) {
    const auto pct = improvement_pct(row.base, row.conf);
    c.require(pct.has_value(), "metric not applicable on a negative pair");
    if (pct)
      c.require(std::abs(*pct - row.printed) <= 1.0,
                "row (" + std::to_string(row.base) + ", " +
                    std::to_string(row.conf) + ") off by more than 1 point");
  }
}

// ---------------------------------------------------------------- criterion 7
void configurator_invariants(Criterion& c) {
  const Network base = gen_random_network(
      {{3, 10, 8, 2}, ActivationKind::Sigmoid, 1.2, true}, 606);
  const Network margin = append_margin_layer(base, 0, 1);
  const InputRegion region{Eigen::VectorXd::Zero(3), 0.5};
  const SearchSpace space;

  const ConfiguratorResult run = configure(margin, region, space, 150, 10, 31);
  c.require(run.history.size() == 150, "history length");
  double incumbent = std::numeric_limits<double>::infinity();
  std::vector<double> incumbents;
  for (const Observation& obs : run.history) {
    c.require(space.contains(obs.config), "config outside the space");
    incumbent = std::min(incumbent, obs.cost);
    incumbents.push_back(incumbent);
  }
  for (std::size_t i = 1; i < incumbents.size(); ++i)
    c.require(incumbents[i] <= incumbents[i - 1], "incumbent increased");
  c.require(run.best_cost == incumbent, "best cost is not the running min");

  const ConfiguratorResult rerun = configure(margin, region, space, 150, 10, 31);
  c.require(rerun.history.size() == run.history.size(), "rerun length");
  for (std::size_t i = 0; i < run.history.size(); ++i) {
    c.require(rerun.history[i].cost == run.history[i].cost,
              "rerun cost differs");
    c.require(to_vector(rerun.history[i].config) ==
                  to_vector(run.history[i].config),
              "rerun config differs");
  }

  std::mt19937_64 rng(1007);
  std::vector<Observation> history;
  std::uniform_real_distribution<double> costs(-3.0, 3.0);
  for (int i = 0; i < 150; ++i) history.push_back({space.sample(rng), costs(rng)});
  const SurrogateModel model = fit_surrogate(history, 17);
  double best = history.front().cost;
  for (const Observation& obs : history) best = std::min(best, obs.cost);
  for (int i = 0; i < 10000; ++i) {
    const double ei = expected_improvement(model, space.sample(rng), best);
    c.require(ei >= 0.0, "negative expected improvement");
    c.require(std::isfinite(ei), "non-finite expected improvement");
  }
}

// ---------------------------------------------------------------- criterion 8
void baseline_tangency(Criterion& c) {
  std::mt19937_64 rng(1008);
  std::uniform_real_distribution<double> anchors(-10.0, -0.01);

  const auto residual = [](ActivationKind kind, double d, double anchor) {
    return sigma_prime(kind, d) * (anchor - d) + sigma(kind, d) -
           sigma(kind, anchor);
  };

  for (int i = 0; i < 1000; ++i) {
    const double anchor = anchors(rng);
    const ActivationKind kind = flip(i);
    const double d_up =
        binary_search_endpoint_tangent(kind, anchor, BoundSide::Upper, 1e-9);
    c.require(std::abs(residual(kind, d_up, anchor)) <= 1e-6,
              "upper residual exceeds 1e-6");
    const double d_lo =
        binary_search_endpoint_tangent(kind, -anchor, BoundSide::Lower, 1e-9);
    c.require(std::abs(residual(kind, d_lo, -anchor)) <= 1e-6,
              "lower residual exceeds 1e-6");
  }
}

// ---------------------------------------------------------------- criterion 9
void ks_correctness(Criterion& c) {
  std::mt19937_64 rng(1009);
  std::uniform_int_distribution<int> sizes(1, 40);
  std::uniform_int_distribution<int> grid(-6, 6);
  std::uniform_real_distribution<double> reals(-3.0, 3.0);

  const auto brute = [](const std::vector<double>& a,
                        const std::vector<double>& b) {
    double d = 0.0;
    std::vector<double> pts = a;
    pts.insert(pts.end(), b.begin(), b.end());
    for (double t : pts) {
      double ca = 0, cb = 0;
      for (double v : a)
        if (v <= t) ++ca;
      for (double v : b)
        if (v <= t) ++cb;
      d = std::max(d, std::abs(ca / a.size() - cb / b.size()));
    }
    return d;
  };

  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> a(static_cast<std::size_t>(sizes(rng)));
    std::vector<double> b(static_cast<std::size_t>(sizes(rng)));
    const bool tied = trial % 2 == 0;
    for (double& v : a) v = tied ? grid(rng) : reals(rng);
    for (double& v : b) v = tied ? grid(rng) : reals(rng);
    const KsResult result = ks_statistic(a, b);
    c.require(result.statistic == brute(a, b), "D differs from brute force");
  }

  c.require(ks_statistic({0.0}, {0.0}).statistic == 0.0, "D(a, a) != 0");
  c.require(ks_statistic({0.0}, {1.0}).statistic == 1.0, "D({0},{1}) != 1");
  std::vector<double> same{0.3, 1.7, -2.0, 0.4, 0.9};
  c.require(ks_statistic(same, same).statistic == 0.0, "self distance");
}

// --------------------------------------------------------------- criterion 10
void epsilon_monotonicity(Criterion& c) {
  const std::vector<double> epsilons{0.0, 0.05, 0.1, 0.2, 0.4, 0.8};

  for (int i = 0; i < 6; ++i) {
    const std::vector<Eigen::Index> shape =
        i % 3 == 0 ? std::vector<Eigen::Index>{2, 6, 2}
                   : (i % 3 == 1 ? std::vector<Eigen::Index>{3, 8, 4, 2}
                                 : std::vector<Eigen::Index>{1, 5, 1});
    const Network base = gen_random_network(
        {shape, flip(i), 1.2, true}, 7000 + static_cast<std::uint64_t>(i));
    const Network margin = base.output_dim() == 1
                               ? base
                               : append_margin_layer(base, 0, 1);
    const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(margin.input_dim());

    double prev_base = std::numeric_limits<double>::infinity();
    double prev_conf = std::numeric_limits<double>::infinity();
    for (double eps : epsilons) {
      const InputRegion region{x0, eps};
      const double baseline =
          global_lower_bound(margin, region, baseline_strategy()).g_star;
      c.require(baseline <= prev_base + 1e-12,
                "baseline bound increased with the radius");
      prev_base = baseline;

      const double configured =
          configure(margin, region, SearchSpace{}, 40, 10, 77).g_star;
      c.require(configured <= prev_conf + 1e-12,
                "configured bound increased with the radius");
      prev_conf = configured;
    }
  }
}

struct Entry {
  int id;
  const char* summary;
  void (*run)(Criterion&);
};

const Entry kEntries[] = {
    {1, "relaxation soundness over random intervals and tangent searches",
     relaxation_soundness},
    {2, "analytic validity matches dense sampling", validity_equivalence},
    {3, "global bounds stay below sampled and grid minima", global_soundness},
    {4, "exactness at zero radius and on affine networks", exactness_limits},
    {5, "configured search beats the baseline on loose instances",
     headline_improvement},
    {6, "improvement metric reproduces the published table", improvement_metric},
    {7, "configurator invariants: incumbent, EI, reproducibility, space",
     configurator_invariants},
    {8, "endpoint tangency residuals within 1e-6", baseline_tangency},
    {9, "KS statistic equals brute-force ECDF evaluation", ks_correctness},
    {10, "bounds are non-increasing in the radius", epsilon_monotonicity},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::strcmp(argv[i], "--criterion") == 0) only = std::atoi(argv[i + 1]);

  int failures = 0;
  for (const Entry& entry : kEntries) {
    if (only != 0 && entry.id != only) continue;
    Criterion c{entry.id, entry.summary};
    entry.run(c);
    std::cout << (c.passed ? "[PASS]" : "[FAIL]") << " criterion " << entry.id
              << ": " << entry.summary << "\n";
    const std::string detail = c.detail.str();
    if (!detail.empty()) std::cout << detail;
    if (!c.passed) ++failures;
  }
  return failures;
}
