#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sigbound/benchmark.hpp"

namespace {

using namespace sigbound;
using nlohmann::json;

Eigen::VectorXd load_vector_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vector file: " + path);
  const json doc = json::parse(in);
  if (!doc.is_array())
    throw std::runtime_error("vector file must be a JSON array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(doc.size()));
  for (std::size_t i = 0; i < doc.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = doc[i].get<double>();
  return v;
}

std::vector<Eigen::Index> parse_sizes(const std::string& csv) {
  std::vector<Eigen::Index> sizes;
  std::stringstream stream(csv);
  std::string token;
  while (std::getline(stream, token, ','))
    sizes.push_back(static_cast<Eigen::Index>(std::stoll(token)));
  return sizes;
}

json outcome_to_json(const VerificationOutcome& outcome) {
  json doc;
  doc["mode"] = outcome.mode;
  doc["g_star"] = outcome.g_star;
  doc["certified"] = outcome.certified;
  doc["label_mismatch"] = outcome.label_mismatch;
  doc["wall_seconds"] = outcome.wall_seconds;
  json per_label = json::object();
  for (const auto& [label, g] : outcome.per_label_g_star)
    per_label[std::to_string(label)] = g;
  doc["per_label_g_star"] = std::move(per_label);
  if (outcome.config_used) {
    const SearchConfig& best = outcome.config_used->best_config;
    doc["best_config"] = {{"s_upper", best.s_upper},
                          {"psi_upper", best.psi_upper},
                          {"s_lower", best.s_lower},
                          {"psi_lower", best.psi_lower}};
    doc["trials"] = outcome.config_used->history.size();
  }
  json tangents = json::array();
  for (const TangentRecord& record : outcome.tangent_records)
    tangents.push_back(
        {{"layer", record.layer},
         {"neuron", record.neuron},
         {"side", record.side == BoundSide::Upper ? "upper" : "lower"},
         {"value", record.value}});
  doc["tangents"] = std::move(tangents);
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robustness bounds for sigmoidal networks via linear "
               "relaxation with configurable tangent search"};
  app.require_subcommand(1);

  // verify
  auto* verify = app.add_subcommand(
      "verify", "Bound the margins of one instance and report certification");
  std::string net_path, x0_path, mode_name = "baseline";
  Eigen::Index label = 0;
  double eps = 0.0;
  int trials = 150;
  std::uint64_t seed = 0;
  verify->add_option("--net", net_path, "network JSON file")->required();
  verify->add_option("--x0", x0_path, "JSON array with the input point")
      ->required();
  verify->add_option("--label", label, "ground-truth label")->required();
  verify->add_option("--eps", eps, "l-infinity radius")->required();
  verify->add_option("--mode", mode_name, "baseline|configured")
      ->check(CLI::IsMember({"baseline", "configured"}));
  verify->add_option("--trials", trials, "configuration trials");
  verify->add_option("--seed", seed, "configuration seed");

  // bench
  auto* bench = app.add_subcommand(
      "bench", "Run an experiment spec over instance sets and epsilon grids");
  std::string spec_path, out_dir;
  int jobs = 1;
  bench->add_option("--spec", spec_path, "experiment spec JSON")->required();
  bench->add_option("--out", out_dir, "output directory")->required();
  bench->add_option("--jobs", jobs, "parallel verification workers");

  // analyze-tangents
  auto* analyze = app.add_subcommand(
      "analyze-tangents",
      "Histogram + KS comparison of recorded tangent points");
  std::string records_path, analysis_out;
  analyze->add_option("--records", records_path, "records.jsonl from bench")
      ->required();
  analyze->add_option("--out", analysis_out, "output JSON file")->required();

  // gen-net
  auto* gen = app.add_subcommand("gen-net",
                                 "Generate a random network JSON file");
  std::string sizes_csv, activation_name = "sigmoid", net_out;
  double scale = 1.0;
  std::uint64_t gen_seed = 0;
  gen->add_option("--sizes", sizes_csv, "layer sizes, e.g. 2,3,1")->required();
  gen->add_option("--activation", activation_name, "sigmoid|tanh")
      ->check(CLI::IsMember({"sigmoid", "tanh"}));
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--scale", scale, "uniform weight scale");
  gen->add_option("--out", net_out, "output network JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      const Network net = load_network_file(net_path);
      const Eigen::VectorXd x0 = load_vector_file(x0_path);
      const VerifyMode mode = mode_name == "baseline"
                                  ? VerifyMode::baseline()
                                  : VerifyMode::configured(trials, seed);
      const VerificationOutcome outcome =
          verify_instance(net, x0, label, eps, mode);
      std::cout << outcome_to_json(outcome).dump(2) << '\n';
    } else if (*bench) {
      const ExperimentSpec spec = load_experiment_spec(spec_path);
      const BenchmarkResult result = run_benchmark(spec, out_dir, jobs);
      std::cout << "wrote " << result.rows.size() << " rows and "
                << result.records.size() << " records to " << out_dir << '\n';
    } else if (*analyze) {
      const std::vector<TangentRow> rows = load_tangent_rows(records_path);
      const std::vector<TangentGroupAnalysis> groups = analyze_tangents(rows);
      std::ofstream out(analysis_out);
      if (!out)
        throw std::runtime_error("cannot open output file: " + analysis_out);
      write_tangent_analysis_json(groups, out);
      std::cout << "analyzed " << groups.size() << " tangent groups\n";
    } else if (*gen) {
      RandomNetworkSpec spec;
      spec.sizes = parse_sizes(sizes_csv);
      spec.activation = activation_from_string(activation_name);
      spec.weight_scale = scale;
      const Network net = gen_random_network(spec, gen_seed);
      std::ofstream out(net_out);
      if (!out) throw std::runtime_error("cannot open output file: " + net_out);
      out << network_to_json(net) << '\n';
      std::cout << "wrote " << net_out << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
