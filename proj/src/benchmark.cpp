#include "sigbound/benchmark.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

namespace sigbound {

using nlohmann::json;

std::vector<VerificationInstance> load_instances(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("instance parse error: ") + e.what());
  }
  if (!doc.is_array())
    throw std::runtime_error("instance file must be a JSON array");

  std::vector<VerificationInstance> instances;
  instances.reserve(doc.size());
  for (const auto& item : doc) {
    VerificationInstance inst;
    const auto& x0 = item.at("x0");
    inst.x0 = Eigen::VectorXd(static_cast<Eigen::Index>(x0.size()));
    for (std::size_t i = 0; i < x0.size(); ++i)
      inst.x0(static_cast<Eigen::Index>(i)) = x0[i].get<double>();
    inst.label = item.at("label").get<Eigen::Index>();
    inst.epsilon = item.value("epsilon", 0.0);
    instances.push_back(std::move(inst));
  }
  return instances;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open experiment spec: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("spec parse error: ") + e.what());
  }

  ExperimentSpec spec;
  for (const auto& item : doc.at("runs")) {
    ExperimentRun run;
    run.dataset = item.value("dataset", "unnamed");
    run.network_tag = item.value("network_tag", "net");
    run.network_path = item.at("network").get<std::string>();
    run.instances_path = item.at("instances").get<std::string>();
    for (const auto& eps : item.at("epsilons"))
      run.epsilons.push_back(eps.get<double>());
    run.trials = item.value("trials", 150);
    run.n_init = item.value("n_init", 10);
    run.seed = item.value("seed", std::uint64_t{0});
    run.only_correctly_classified =
        item.value("only_correctly_classified", false);
    run.max_instances = item.value("max_instances", -1);
    spec.runs.push_back(std::move(run));
  }
  return spec;
}

namespace {

const char* side_name(BoundSide side) {
  return side == BoundSide::Upper ? "upper" : "lower";
}

BoundSide side_from_name(const std::string& name) {
  if (name == "upper") return BoundSide::Upper;
  if (name == "lower") return BoundSide::Lower;
  throw std::runtime_error("unknown bound side: " + name);
}

InstanceRecord make_record(const ExperimentRun& run, double epsilon,
                           int instance_index, const VerificationInstance& inst,
                           const VerificationOutcome& outcome) {
  InstanceRecord rec;
  rec.dataset = run.dataset;
  rec.network_tag = run.network_tag;
  rec.epsilon = epsilon;
  rec.instance_index = instance_index;
  rec.label = inst.label;
  rec.mode = outcome.mode;
  rec.g_star = outcome.g_star;
  rec.certified = outcome.certified;
  rec.label_mismatch = outcome.label_mismatch;
  rec.wall_seconds = outcome.wall_seconds;
  rec.per_label = outcome.per_label_g_star;
  rec.tangents = outcome.tangent_records;
  return rec;
}

// run a worker pool over [0, count); deterministic because each task writes
// only its own slot
void parallel_for(int count, int jobs, const std::function<void(int)>& task) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  const int n_workers = std::min(jobs, count);
  workers.reserve(static_cast<std::size_t>(n_workers));
  for (int w = 0; w < n_workers; ++w)
    workers.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1))
        task(i);
    });
  for (std::thread& worker : workers) worker.join();
}

}  // namespace

BenchmarkResult run_benchmark(const ExperimentSpec& spec, int jobs) {
  BenchmarkResult result;

  for (const ExperimentRun& run : spec.runs) {
    const Network net = load_network_file(run.network_path);
    std::vector<VerificationInstance> instances =
        load_instances(run.instances_path);
    if (run.max_instances >= 0 &&
        static_cast<int>(instances.size()) > run.max_instances)
      instances.resize(static_cast<std::size_t>(run.max_instances));
    if (run.only_correctly_classified) {
      std::vector<VerificationInstance> kept;
      for (const VerificationInstance& inst : instances) {
        Eigen::Index predicted = 0;
        eval_forward(net, inst.x0).maxCoeff(&predicted);
        if (predicted == inst.label) kept.push_back(inst);
      }
      instances = std::move(kept);
    }

    const std::string activation =
        net.layers.empty() ? "none" : to_string(net.layers.front().activation);

    for (const double epsilon : run.epsilons) {
      const int count = static_cast<int>(instances.size());
      std::vector<VerificationOutcome> base_outcomes(
          static_cast<std::size_t>(count));
      std::vector<VerificationOutcome> conf_outcomes(
          static_cast<std::size_t>(count));

      parallel_for(count, jobs, [&](int i) {
        const VerificationInstance& inst =
            instances[static_cast<std::size_t>(i)];
        const std::uint64_t seed =
            run.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(i);
        base_outcomes[static_cast<std::size_t>(i)] = verify_instance(
            net, inst.x0, inst.label, epsilon, VerifyMode::baseline());
        conf_outcomes[static_cast<std::size_t>(i)] = verify_instance(
            net, inst.x0, inst.label, epsilon,
            VerifyMode::configured(run.trials, seed, run.n_init));
      });

      BenchmarkRow row;
      row.dataset = run.dataset;
      row.network_tag = run.network_tag;
      row.activation = activation;
      row.epsilon = epsilon;
      row.instance_count = count;

      double base_sum = 0.0, conf_sum = 0.0;
      for (int i = 0; i < count; ++i) {
        const auto& base = base_outcomes[static_cast<std::size_t>(i)];
        const auto& conf = conf_outcomes[static_cast<std::size_t>(i)];
        base_sum += base.g_star;
        conf_sum += conf.g_star;
        row.certified_baseline += base.certified ? 1 : 0;
        row.certified_configured += conf.certified ? 1 : 0;
        result.records.push_back(make_record(
            run, epsilon, i, instances[static_cast<std::size_t>(i)], base));
        result.records.push_back(make_record(
            run, epsilon, i, instances[static_cast<std::size_t>(i)], conf));
      }
      if (count > 0) {
        row.avg_g_star_baseline = base_sum / count;
        row.avg_g_star_configured = conf_sum / count;
        row.improvement = improvement_pct(row.avg_g_star_baseline,
                                          row.avg_g_star_configured);
      }
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

BenchmarkResult run_benchmark(const ExperimentSpec& spec,
                              const std::string& out_dir, int jobs) {
  BenchmarkResult result = run_benchmark(spec, jobs);
  std::filesystem::create_directories(out_dir);

  std::ofstream csv(out_dir + "/benchmark.csv");
  write_benchmark_csv(result.rows, csv);

  std::ofstream records(out_dir + "/records.jsonl");
  write_records_jsonl(result.records, records);
  return result;
}

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

void write_benchmark_csv(const std::vector<BenchmarkRow>& rows,
                         std::ostream& out) {
  out << "dataset,network,activation,epsilon,instances,"
         "avg_g_star_baseline,avg_g_star_configured,improvement_pct,"
         "certified_baseline,certified_configured\n";
  for (const BenchmarkRow& row : rows) {
    out << row.dataset << ',' << row.network_tag << ',' << row.activation
        << ',' << fixed6(row.epsilon) << ',' << row.instance_count << ','
        << fixed6(row.avg_g_star_baseline) << ','
        << fixed6(row.avg_g_star_configured) << ',';
    if (row.improvement) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.2f", *row.improvement);
      out << buf;
    } else {
      out << '-';
    }
    out << ',' << row.certified_baseline << ',' << row.certified_configured
        << '\n';
  }
}

void write_records_jsonl(const std::vector<InstanceRecord>& records,
                         std::ostream& out) {
  for (const InstanceRecord& rec : records) {
    json line;
    line["dataset"] = rec.dataset;
    line["network"] = rec.network_tag;
    line["epsilon"] = rec.epsilon;
    line["instance"] = rec.instance_index;
    line["label"] = rec.label;
    line["mode"] = rec.mode;
    line["g_star"] = rec.g_star;
    line["certified"] = rec.certified;
    line["label_mismatch"] = rec.label_mismatch;
    line["wall_seconds"] = rec.wall_seconds;
    json per_label = json::object();
    for (const auto& [label, g] : rec.per_label)
      per_label[std::to_string(label)] = g;
    line["per_label"] = std::move(per_label);
    json tangents = json::array();
    for (const TangentRecord& record : rec.tangents)
      tangents.push_back({{"layer", record.layer},
                          {"neuron", record.neuron},
                          {"side", side_name(record.side)},
                          {"value", record.value}});
    line["tangents"] = std::move(tangents);
    out << line.dump() << '\n';
  }
}

std::vector<TangentRow> load_tangent_rows(const std::string& jsonl_path) {
  std::ifstream in(jsonl_path);
  if (!in) throw std::runtime_error("cannot open records: " + jsonl_path);

  std::vector<TangentRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json rec = json::parse(line);
    const std::string mode = rec.at("mode").get<std::string>();
    for (const auto& tangent : rec.at("tangents"))
      rows.push_back({tangent.at("layer").get<Eigen::Index>(),
                      side_from_name(tangent.at("side").get<std::string>()),
                      tangent.at("value").get<double>(), mode});
  }
  return rows;
}

std::vector<TangentGroupAnalysis> analyze_tangents(
    const std::vector<TangentRow>& rows) {
  std::map<std::pair<Eigen::Index, int>,
           std::pair<std::vector<double>, std::vector<double>>>
      groups;
  for (const TangentRow& row : rows) {
    auto& group = groups[{row.layer, row.side == BoundSide::Upper ? 1 : 0}];
    if (row.mode == "baseline")
      group.first.push_back(row.value);
    else
      group.second.push_back(row.value);
  }

  std::vector<TangentGroupAnalysis> result;
  for (const auto& [key, samples] : groups) {
    TangentGroupAnalysis analysis;
    analysis.layer = key.first;
    analysis.side = key.second == 1 ? BoundSide::Upper : BoundSide::Lower;

    const auto& [baseline, configured] = samples;
    if (baseline.empty() || configured.empty()) {
      analysis.skipped = true;
      std::cerr << "analyze_tangents: layer " << analysis.layer << " "
                << side_name(analysis.side)
                << " has records for only one mode; skipped\n";
      result.push_back(std::move(analysis));
      continue;
    }

    double lo = baseline.front(), hi = baseline.front();
    for (double v : baseline) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    for (double v : configured) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi == lo) hi = lo + 1.0;  // all mass in one bin
    analysis.bin_lo = lo;
    analysis.bin_hi = hi;
    analysis.baseline_counts.assign(kHistogramBins, 0);
    analysis.configured_counts.assign(kHistogramBins, 0);
    const auto bin_of = [&](double v) {
      const int bin =
          static_cast<int>((v - lo) / (hi - lo) * kHistogramBins);
      return std::clamp(bin, 0, kHistogramBins - 1);
    };
    for (double v : baseline)
      ++analysis.baseline_counts[static_cast<std::size_t>(bin_of(v))];
    for (double v : configured)
      ++analysis.configured_counts[static_cast<std::size_t>(bin_of(v))];

    analysis.ks = ks_statistic(baseline, configured);
    analysis.significant = analysis.ks->p_value < 0.05;
    result.push_back(std::move(analysis));
  }
  return result;
}

void write_tangent_analysis_json(
    const std::vector<TangentGroupAnalysis>& groups, std::ostream& out) {
  json doc = json::array();
  for (const TangentGroupAnalysis& group : groups) {
    json entry;
    entry["layer"] = group.layer;
    entry["side"] = side_name(group.side);
    entry["skipped"] = group.skipped;
    if (!group.skipped) {
      entry["bin_lo"] = group.bin_lo;
      entry["bin_hi"] = group.bin_hi;
      entry["bins"] = kHistogramBins;
      entry["baseline_counts"] = group.baseline_counts;
      entry["configured_counts"] = group.configured_counts;
      entry["ks_d"] = group.ks->statistic;
      entry["ks_p"] = group.ks->p_value;
      entry["baseline_n"] = group.ks->n_a;
      entry["configured_n"] = group.ks->n_b;
      entry["significant"] = group.significant;
    }
    doc.push_back(std::move(entry));
  }
  out << doc.dump(2) << '\n';
}

}  // namespace sigbound
