#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "desmr/datagen.hpp"
#include "desmr/surrogate.hpp"

namespace desmr {

/// Everything one synthetic study needs; serializable to/from JSON so runs
/// can be driven by config files.
struct ExperimentConfig {
  // data
  int m = 10;
  int n = 200;
  int p = 100;
  int s = 10;
  std::string cov_mode = "homogeneous";  // homogeneous | per_node_random
  double sigma2 = 1.0;
  double rho = 0.1;
  std::string noise_mode = "homogeneous";
  std::string noise = "normal";  // normal|exponential|cauchy|student_t|none
  double noise_scale = 1.0;
  int noise_df = 1;

  // topology
  std::string topology = "erdos_renyi";  // erdos_renyi | complete | file
  double edge_prob = 0.3;
  std::string edge_file;

  // methods and algorithm parameters
  std::vector<std::string> methods = {"desmr", "delr"};
  int outer_rounds = 10;
  int inner_rounds = 50;
  int budget_rounds = 500;  // deLR / D-subGD round budget (= V x T parity)
  double tau = 1.0;
  double rho_margin = 1.05;
  int lambda_grid_size = 30;
  int lad_grid_size = 20;
  double zero_tol = 1e-4;
  int oracle_s = 0;
  double eta0 = 0.1;
  std::string init_mode = "lad_lasso";  // lad_lasso|l2_lasso|oracle_perturb
  double init_perturb_sigma = 0.1;

  // outlier scenario applied after generation
  std::string scenario = "none";  // none | balanced | attacker

  // run control
  int repetitions = 20;
  std::uint64_t seed = 1u;
  std::string output_dir;

  nlohmann::ordered_json to_json() const;
  static ExperimentConfig from_json(const nlohmann::ordered_json& j);
};

struct MetricRow {
  std::string method;
  int repetition;
  std::string metric;
  double value;
};

struct AggregateRow {
  std::string method;
  std::string metric;
  double mean;
  double std_error;
  int count;
};

struct ExperimentReport {
  std::vector<MetricRow> rows;
  std::vector<AggregateRow> aggregates;
  std::vector<OuterTraceRow> first_rep_trace;
  std::vector<std::string> failures;  // per-repetition notes
  nlohmann::ordered_json config_echo;

  /// Mean of a metric for one method (NaN if absent).
  double mean_of(const std::string& method, const std::string& metric) const;
};

/// Runs every listed method on `repetitions` independently generated
/// (topology, dataset) pairs with derived seeds, computes the metric set,
/// and aggregates. Methods share data, topology, initializers, and the
/// round-budget parity rule, so cross-method rows are directly comparable.
/// Repetition failures are recorded and skipped, not fatal.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Aggregates recomputed from rows (mean and standard error per
/// method/metric pair).
std::vector<AggregateRow> aggregate_rows(const std::vector<MetricRow>& rows);

/// report.csv (long format), report.json (aggregates + config echo),
/// trace.csv (first repetition's outer trace).
void write_report(const ExperimentReport& report, const std::string& dir);

/// Initializer sensitivity: the four initializer variants, each pushed
/// through exactly one outer iteration of the surrogate loop.
ExperimentReport run_init_sensitivity(const ExperimentConfig& cfg);

struct RealDataOptions {
  std::string csv_path;
  std::string response_column;
  std::string group_column;
  std::string group_map_csv;  // optional key->group remap table
  std::string edge_file;      // node graph over sorted group labels
  std::string scenario = "original";  // original | balanced | attacker
  std::vector<std::string> methods = {"desmr", "delr"};
  int outer_rounds = 10;
  int inner_rounds = 50;
  int budget_rounds = 500;
  int lambda_grid_size = 30;
  int lad_grid_size = 20;
  double zero_tol = 1e-4;
  double test_fraction = 0.2;
  std::uint64_t seed = 1u;
  std::string output_dir;
};

/// CSV ingestion + optional contamination + model fits; rows carry rmse
/// and mae on the held-out split.
ExperimentReport run_realdata(const RealDataOptions& opts);

}  // namespace desmr
