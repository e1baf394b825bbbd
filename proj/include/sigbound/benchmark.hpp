#pragma once

#include "sigbound/stats.hpp"
#include "sigbound/verification.hpp"

namespace sigbound {

/// One labelled input point; epsilon here is informational, benchmark rows
/// take their radii from the experiment spec grid.
struct VerificationInstance {
  Eigen::VectorXd x0;
  Eigen::Index label = 0;
  double epsilon = 0.0;
};

std::vector<VerificationInstance> load_instances(const std::string& path);

/// One (network, instance set) pairing swept over an epsilon grid.
struct ExperimentRun {
  std::string dataset;
  std::string network_tag;
  std::string network_path;
  std::string instances_path;
  std::vector<double> epsilons;
  int trials = 150;
  int n_init = 10;
  std::uint64_t seed = 0;
  bool only_correctly_classified = false;
  int max_instances = -1;  // -1 keeps all
};

struct ExperimentSpec {
  std::vector<ExperimentRun> runs;
};

ExperimentSpec load_experiment_spec(const std::string& path);

/// Aggregated result of one (network, epsilon) pair in paired design:
/// both modes over the same instances.
struct BenchmarkRow {
  std::string dataset;
  std::string network_tag;
  std::string activation;
  double epsilon = 0.0;
  int instance_count = 0;
  double avg_g_star_baseline = 0.0;
  double avg_g_star_configured = 0.0;
  std::optional<double> improvement;  // absent outside the negative regime
  int certified_baseline = 0;
  int certified_configured = 0;
};

/// Per-instance record, one per (instance, epsilon, mode).
struct InstanceRecord {
  std::string dataset;
  std::string network_tag;
  double epsilon = 0.0;
  int instance_index = 0;
  Eigen::Index label = 0;
  std::string mode;
  double g_star = 0.0;
  bool certified = false;
  bool label_mismatch = false;
  double wall_seconds = 0.0;
  std::map<Eigen::Index, double> per_label;
  std::vector<TangentRecord> tangents;
};

struct BenchmarkResult {
  std::vector<BenchmarkRow> rows;
  std::vector<InstanceRecord> records;
};

BenchmarkResult run_benchmark(const ExperimentSpec& spec, int jobs = 1);

/// Runs the spec and writes <out_dir>/benchmark.csv plus
/// <out_dir>/records.jsonl. Output is deterministic given the spec's seeds.
BenchmarkResult run_benchmark(const ExperimentSpec& spec,
                              const std::string& out_dir, int jobs);

void write_benchmark_csv(const std::vector<BenchmarkRow>& rows,
                         std::ostream& out);
void write_records_jsonl(const std::vector<InstanceRecord>& records,
                         std::ostream& out);

std::vector<TangentRow> load_tangent_rows(const std::string& jsonl_path);

/// Histogram + KS comparison of baseline vs configured tangent points for
/// one (activation layer, bound side) group.
struct TangentGroupAnalysis {
  Eigen::Index layer = 0;
  BoundSide side = BoundSide::Upper;
  double bin_lo = 0.0;
  double bin_hi = 0.0;
  std::vector<int> baseline_counts;
  std::vector<int> configured_counts;
  std::optional<KsResult> ks;
  bool significant = false;  // p < 0.05
  bool skipped = false;      // one mode missing
};

inline constexpr int kHistogramBins = 50;

std::vector<TangentGroupAnalysis> analyze_tangents(
    const std::vector<TangentRow>& rows);

void write_tangent_analysis_json(
    const std::vector<TangentGroupAnalysis>& groups, std::ostream& out);

}  // namespace sigbound
