#include "desmr/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "desmr/csv.hpp"
#include "desmr/lasso_cd.hpp"
#include "desmr/metrics.hpp"
#include "desmr/pooled_fit.hpp"
#include "desmr/rng.hpp"

namespace desmr {

namespace {

constexpr const char* kVersion = "desmr 1.0.0";
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

NoiseSpec make_noise_spec(const std::string& family, double scale, int df) {
  if (family == "normal") return NoiseSpec::normal(0.0, scale);
  if (family == "exponential") return NoiseSpec::exponential(1.0 / scale);
  if (family == "cauchy") return NoiseSpec::cauchy(0.0, scale);
  if (family == "student_t") return NoiseSpec::student_t(df);
  if (family == "none") return NoiseSpec::none();
  throw std::invalid_argument("unknown noise family: " + family);
}

Topology make_topology(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.topology == "erdos_renyi")
    return gen_erdos_renyi(cfg.m, cfg.edge_prob, seed);
  if (cfg.topology == "complete") return gen_complete(cfg.m);
  if (cfg.topology == "file") return load_topology(cfg.edge_file, cfg.m);
  throw std::invalid_argument("unknown topology: " + cfg.topology);
}

/// Pooled test-set residual scores across all nodes that hold test rows,
/// each node predicting with its own row of estimates.
PredScores pooled_prediction(const Matrix& per_node_beta,
                             const NetworkDataset& data) {
  double sq = 0.0, abs_sum = 0.0;
  Index count = 0;
  for (int j = 0; j < data.m(); ++j) {
    const auto& node = data.nodes[j];
    if (!node.has_test()) continue;
    const Vector resid =
        node.y_test - node.X_test * per_node_beta.row(j).transpose();
    sq += resid.squaredNorm();
    abs_sum += resid.lpNorm<1>();
    count += resid.size();
  }
  PredScores s;
  if (count == 0) {
    s.rmse = s.mae = kNan;
    return s;
  }
  s.rmse = std::sqrt(sq / static_cast<double>(count));
  s.mae = abs_sum / static_cast<double>(count);
  return s;
}

void append_method_rows(std::vector<MetricRow>* rows, const std::string& id,
                        int rep, const Matrix& per_node_beta,
                        const NetworkDataset& data, double zero_tol) {
  auto push = [&](const std::string& metric, double value) {
    rows->push_back({id, rep, metric, value});
  };
  if (data.beta_star) {
    push("l2_error", l2_error(per_node_beta, *data.beta_star));
    double recall = 0.0, precision = 0.0, f1 = 0.0;
    for (int j = 0; j < data.m(); ++j) {
      const SupportScores s = support_metrics(per_node_beta.row(j),
                                              *data.beta_star, zero_tol);
      recall += s.recall;
      precision += s.precision;
      f1 += s.f1;
    }
    push("recall", recall / data.m());
    push("precision", precision / data.m());
    push("f1", f1 / data.m());
  }
  bool any_test = false;
  for (const auto& node : data.nodes) any_test |= node.has_test();
  if (any_test) {
    const PredScores s = pooled_prediction(per_node_beta, data);
    push("rmse", s.rmse);
    push("mae", s.mae);
  }
}

/// Per-node l2 lasso with per-node BIC; the alternative initializer.
Matrix l2_lasso_estimates(const NetworkDataset& data, int grid_size,
                          double zero_tol) {
  Matrix beta(data.m(), data.p());
  for (int j = 0; j < data.m(); ++j) {
    const auto& node = data.nodes[j];
    const double inv_n = 1.0 / static_cast<double>(node.n());
    const Matrix q = node.X.transpose() * node.X * inv_n;
    const Vector c = node.X.transpose() * node.y * inv_n;
    const Vector grid = lasso_lambda_grid_from_gradient(c, grid_size);
    const double yty = node.y.squaredNorm() * inv_n;
    Vector warm = Vector::Zero(data.p());
    auto fit = [&](double lambda) {
      LassoCdOptions opts;
      opts.warm_start = warm;
      Vector b = lasso_cd_gram(q, c, lambda, opts);
      warm = b;
      return b;
    };
    auto loss = [&](const Vector& b) {
      return std::max(yty - 2.0 * c.dot(b) + b.dot(q * b), 0.0);
    };
    beta.row(j) = bic_select(grid, fit, loss, node.n(), zero_tol).beta;
  }
  return beta;
}

Matrix perturbed_truth(const NetworkDataset& data, double sigma,
                       std::uint64_t seed) {
  if (!data.beta_star)
    throw std::invalid_argument("oracle initializer needs beta_star");
  Matrix beta(data.m(), data.p());
  for (int j = 0; j < data.m(); ++j) {
    Rng rng(derive_seed(seed, j));
    for (Index i = 0; i < data.p(); ++i) {
      const double b = (*data.beta_star)[i];
      beta(j, i) = b == 0.0 ? 0.0 : b + rng.normal(0.0, sigma);
    }
  }
  return beta;
}

LadFitOptions lad_options(const ExperimentConfig& cfg) {
  LadFitOptions opts;
  opts.lambda_grid_size = cfg.lad_grid_size;
  opts.zero_tol = cfg.zero_tol;
  return opts;
}

SurrogateConfig surrogate_config(const ExperimentConfig& cfg) {
  SurrogateConfig sc;
  sc.outer_rounds = cfg.outer_rounds;
  sc.inner_rounds = cfg.inner_rounds;
  sc.tau = cfg.tau;
  sc.rho_margin = cfg.rho_margin;
  sc.oracle_s = cfg.oracle_s;
  sc.lambda_grid_size = cfg.lambda_grid_size;
  sc.zero_tol = cfg.zero_tol;
  sc.init = lad_options(cfg);
  return sc;
}

bool wants(const ExperimentConfig& cfg, const std::string& method) {
  return std::find(cfg.methods.begin(), cfg.methods.end(), method) !=
         cfg.methods.end();
}

}  // namespace

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["m"] = m;
  j["n"] = n;
  j["p"] = p;
  j["s"] = s;
  j["cov_mode"] = cov_mode;
  j["sigma2"] = sigma2;
  j["rho"] = rho;
  j["noise_mode"] = noise_mode;
  j["noise"] = noise;
  j["noise_scale"] = noise_scale;
  j["noise_df"] = noise_df;
  j["topology"] = topology;
  j["edge_prob"] = edge_prob;
  j["edge_file"] = edge_file;
  j["methods"] = methods;
  j["outer_rounds"] = outer_rounds;
  j["inner_rounds"] = inner_rounds;
  j["budget_rounds"] = budget_rounds;
  j["tau"] = tau;
  j["rho_margin"] = rho_margin;
  j["lambda_grid_size"] = lambda_grid_size;
  j["lad_grid_size"] = lad_grid_size;
  j["zero_tol"] = zero_tol;
  j["oracle_s"] = oracle_s;
  j["eta0"] = eta0;
  j["init_mode"] = init_mode;
  j["init_perturb_sigma"] = init_perturb_sigma;
  j["scenario"] = scenario;
  j["repetitions"] = repetitions;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::ordered_json& j) {
  ExperimentConfig cfg;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("m", cfg.m);
  get("n", cfg.n);
  get("p", cfg.p);
  get("s", cfg.s);
  get("cov_mode", cfg.cov_mode);
  get("sigma2", cfg.sigma2);
  get("rho", cfg.rho);
  get("noise_mode", cfg.noise_mode);
  get("noise", cfg.noise);
  get("noise_scale", cfg.noise_scale);
  get("noise_df", cfg.noise_df);
  get("topology", cfg.topology);
  get("edge_prob", cfg.edge_prob);
  get("edge_file", cfg.edge_file);
  get("methods", cfg.methods);
  get("outer_rounds", cfg.outer_rounds);
  get("inner_rounds", cfg.inner_rounds);
  get("budget_rounds", cfg.budget_rounds);
  get("tau", cfg.tau);
  get("rho_margin", cfg.rho_margin);
  get("lambda_grid_size", cfg.lambda_grid_size);
  get("lad_grid_size", cfg.lad_grid_size);
  get("zero_tol", cfg.zero_tol);
  get("oracle_s", cfg.oracle_s);
  get("eta0", cfg.eta0);
  get("init_mode", cfg.init_mode);
  get("init_perturb_sigma", cfg.init_perturb_sigma);
  get("scenario", cfg.scenario);
  get("repetitions", cfg.repetitions);
  get("seed", cfg.seed);
  get("output_dir", cfg.output_dir);
  return cfg;
}

double ExperimentReport::mean_of(const std::string& method,
                                 const std::string& metric) const {
  for (const auto& agg : aggregates)
    if (agg.method == method && agg.metric == metric) return agg.mean;
  return kNan;
}

std::vector<AggregateRow> aggregate_rows(const std::vector<MetricRow>& rows) {
  // Keyed by (method, metric), first-appearance order.
  std::vector<AggregateRow> out;
  auto find = [&](const MetricRow& row) -> AggregateRow* {
    for (auto& agg : out)
      if (agg.method == row.method && agg.metric == row.metric) return &agg;
    out.push_back({row.method, row.metric, 0.0, 0.0, 0});
    return &out.back();
  };
  std::vector<std::vector<double>> samples;
  std::vector<AggregateRow*> keys;
  for (const auto& row : rows) {
    AggregateRow* agg = find(row);
    auto it = std::find(keys.begin(), keys.end(), agg);
    if (it == keys.end()) {
      keys.push_back(agg);
      samples.emplace_back();
      it = keys.end() - 1;
    }
    samples[it - keys.begin()].push_back(row.value);
  }
  for (size_t i = 0; i < keys.size(); ++i) {
    const auto& vals = samples[i];
    const double n = static_cast<double>(vals.size());
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    keys[i]->mean = mean;
    keys[i]->std_error = vals.size() > 1 ? std::sqrt(var / (n - 1) / n) : 0.0;
    keys[i]->count = static_cast<int>(vals.size());
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.repetitions < 1) throw std::invalid_argument("repetitions >= 1");
  ExperimentReport report;
  report.config_echo = cfg.to_json();

  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    const std::uint64_t rep_seed = derive_seed(cfg.seed, rep);
    try {
      Topology topo = make_topology(cfg, derive_seed(rep_seed, 11));
      const CovMode cov_mode = cfg.cov_mode == "per_node_random"
                                   ? CovMode::random_per_node()
                                   : CovMode::homogeneous({cfg.sigma2, cfg.rho});
      const NoiseMode noise_mode =
          cfg.noise_mode == "per_node_random"
              ? NoiseMode::random_per_node()
              : NoiseMode::homogeneous(
                    make_noise_spec(cfg.noise, cfg.noise_scale, cfg.noise_df));
      NetworkDataset data = gen_network_data(
          cfg.m, cfg.n, cfg.p, default_beta_star(cfg.p, cfg.s), cov_mode,
          noise_mode, derive_seed(rep_seed, 22));

      if (cfg.scenario == "balanced") {
        data = inject_outliers(data, OutlierScenario::balanced(),
                               derive_seed(rep_seed, 33))
                   .data;
      } else if (cfg.scenario == "attacker") {
        InjectionResult injected =
            inject_outliers(data, OutlierScenario::attacker(),
                            derive_seed(rep_seed, 33), &topo);
        data = std::move(injected.data);
        topo = std::move(*injected.topology);
      } else if (cfg.scenario != "none") {
        throw std::invalid_argument("unknown scenario: " + cfg.scenario);
      }

      const bool need_local = wants(cfg, "local_mr") || wants(cfg, "avg_mr") ||
                              wants(cfg, "d_subgd") ||
                              (wants(cfg, "desmr") &&
                               cfg.init_mode == "lad_lasso");
      MethodResult local;
      if (need_local) local = local_mr(data, lad_options(cfg));

      MethodResult pooled;
      bool pooled_done = false;
      if (wants(cfg, "pooled_mr") || wants(cfg, "d_subgd")) {
        pooled = pooled_mr(data, lad_options(cfg));
        pooled_done = true;
      }

      for (const std::string& method : cfg.methods) {
        if (method == "desmr") {
          SurrogateConfig sc = surrogate_config(cfg);
          if (cfg.init_mode == "lad_lasso")
            sc.init_beta = local.per_node_beta;
          else if (cfg.init_mode == "l2_lasso")
            sc.init_beta = l2_lasso_estimates(data, cfg.lambda_grid_size,
                                              cfg.zero_tol);
          else if (cfg.init_mode == "oracle_perturb")
            sc.init_beta = perturbed_truth(data, cfg.init_perturb_sigma,
                                           derive_seed(rep_seed, 44));
          else
            throw std::invalid_argument("unknown init mode: " + cfg.init_mode);
          const OuterResult run = run_outer_loop(data, topo, sc);
          append_method_rows(&report.rows, "desmr", rep, run.outer.beta_hat,
                             data, cfg.zero_tol);
          if (rep == 0) report.first_rep_trace = run.outer.trace;
        } else if (method == "delr") {
          DelrOptions opts;
          opts.rounds = cfg.budget_rounds;
          opts.tau = cfg.tau;
          opts.rho_margin = cfg.rho_margin;
          opts.lambda_grid_size = cfg.lambda_grid_size;
          opts.zero_tol = cfg.zero_tol;
          const MethodResult r = delr(data, topo, opts);
          append_method_rows(&report.rows, r.method_id, rep, r.per_node_beta,
                             data, cfg.zero_tol);
        } else if (method == "pooled_mr") {
          append_method_rows(&report.rows, "pooled_mr", rep,
                             pooled.per_node_beta, data, cfg.zero_tol);
        } else if (method == "local_mr") {
          append_method_rows(&report.rows, "local_mr", rep,
                             local.per_node_beta, data, cfg.zero_tol);
        } else if (method == "avg_mr") {
          const MethodResult avg = avg_mr(local);
          append_method_rows(&report.rows, "avg_mr", rep, avg.per_node_beta,
                             data, cfg.zero_tol);
        } else if (method == "d_subgd") {
          DsubgdOptions opts;
          opts.steps = cfg.budget_rounds;
          opts.eta0 = cfg.eta0;
          opts.lambda = pooled_done ? pooled.lambda_selected : 0.0;
          const DsubgdResult r =
              d_subgd(data, topo, local.per_node_beta, opts);
          append_method_rows(&report.rows, "d_subgd", rep,
                             r.result.per_node_beta, data, cfg.zero_tol);
        } else {
          throw std::invalid_argument("unknown method: " + method);
        }
      }
    } catch (const std::exception& e) {
      report.failures.push_back("repetition " + std::to_string(rep) + ": " +
                                e.what());
      std::cerr << report.failures.back() << "\n";
    }
  }

  report.aggregates = aggregate_rows(report.rows);
  if (!cfg.output_dir.empty()) write_report(report, cfg.output_dir);
  return report;
}

ExperimentReport run_init_sensitivity(const ExperimentConfig& base) {
  ExperimentReport report;
  report.config_echo = base.to_json();
  report.config_echo["study"] = "init_sensitivity";

  struct Mode {
    std::string id;
    std::string init_mode;
    double sigma;
  };
  const std::vector<Mode> modes = {
      {"init_l2_lasso", "l2_lasso", 0.0},
      {"init_lad_lasso", "lad_lasso", 0.0},
      {"init_oracle_0.1", "oracle_perturb", 0.1},
      {"init_oracle_0.5", "oracle_perturb", 0.5},
  };
  for (const Mode& mode : modes) {
    ExperimentConfig cfg = base;
    cfg.methods = {"desmr"};
    cfg.outer_rounds = 1;  // single refinement pass, per the study design
    cfg.init_mode = mode.init_mode;
    cfg.init_perturb_sigma = mode.sigma;
    cfg.output_dir.clear();
    const ExperimentReport one = run_experiment(cfg);
    for (MetricRow row : one.rows) {
      row.method = mode.id;
      report.rows.push_back(row);
    }
    for (const auto& f : one.failures)
      report.failures.push_back(mode.id + ": " + f);
  }
  report.aggregates = aggregate_rows(report.rows);
  if (!base.output_dir.empty()) write_report(report, base.output_dir);
  return report;
}

void write_report(const ExperimentReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  std::ofstream csv(dir + "/report.csv");
  csv << "method,metric,repetition,value\n";
  csv.precision(12);
  for (const auto& row : report.rows)
    csv << row.method << "," << row.metric << "," << row.repetition << ","
        << row.value << "\n";

  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["config"] = report.config_echo;
  nlohmann::ordered_json aggs = nlohmann::ordered_json::array();
  for (const auto& agg : report.aggregates) {
    nlohmann::ordered_json a;
    a["method"] = agg.method;
    a["metric"] = agg.metric;
    a["mean"] = agg.mean;
    a["std_error"] = agg.std_error;
    a["count"] = agg.count;
    aggs.push_back(a);
  }
  j["aggregates"] = aggs;
  j["failures"] = report.failures;
  std::ofstream(dir + "/report.json") << j.dump(2) << "\n";

  write_outer_trace_csv(dir + "/trace.csv", report.first_rep_trace);
}

ExperimentReport run_realdata(const RealDataOptions& opts) {
  CsvLoadOptions load;
  load.response_column = opts.response_column;
  load.group_column = opts.group_column;
  load.group_map_csv = opts.group_map_csv;
  load.test_fraction = opts.test_fraction;
  load.seed = derive_seed(opts.seed, 1);
  const CsvLoadResult loaded = load_csv(opts.csv_path, load);

  NetworkDataset data = loaded.data;
  const int m = data.m();
  Topology topo =
      opts.edge_file.empty() ? gen_complete(m) : load_topology(opts.edge_file, m);

  if (opts.scenario == "balanced") {
    data = inject_outliers(data, OutlierScenario::balanced(),
                           derive_seed(opts.seed, 2))
               .data;
  } else if (opts.scenario == "attacker") {
    InjectionResult injected = inject_outliers(
        data, OutlierScenario::attacker(), derive_seed(opts.seed, 2), &topo);
    data = std::move(injected.data);
    topo = std::move(*injected.topology);
  } else if (opts.scenario != "original") {
    throw std::invalid_argument("unknown scenario: " + opts.scenario);
  }

  ExperimentReport report;
  nlohmann::ordered_json echo;
  echo["csv"] = opts.csv_path;
  echo["scenario"] = opts.scenario;
  echo["m"] = data.m();
  echo["p"] = data.p();
  echo["rows_used"] = loaded.rows_used;
  echo["groups"] = loaded.group_labels;
  echo["dropped_columns"] = loaded.dropped_columns;
  echo["seed"] = opts.seed;
  report.config_echo = echo;

  LadFitOptions lad;
  lad.lambda_grid_size = opts.lad_grid_size;
  lad.zero_tol = opts.zero_tol;

  for (const std::string& method : opts.methods) {
    if (method == "desmr") {
      SurrogateConfig sc;
      sc.outer_rounds = opts.outer_rounds;
      sc.inner_rounds = opts.inner_rounds;
      sc.lambda_grid_size = opts.lambda_grid_size;
      sc.zero_tol = opts.zero_tol;
      sc.init = lad;
      const OuterResult run = run_outer_loop(data, topo, sc);
      append_method_rows(&report.rows, "desmr", 0, run.outer.beta_hat, data,
                         opts.zero_tol);
      report.first_rep_trace = run.outer.trace;
    } else if (method == "delr") {
      DelrOptions dl;
      dl.rounds = opts.budget_rounds;
      dl.lambda_grid_size = opts.lambda_grid_size;
      dl.zero_tol = opts.zero_tol;
      const MethodResult r = delr(data, topo, dl);
      append_method_rows(&report.rows, "delr", 0, r.per_node_beta, data,
                         opts.zero_tol);
    } else if (method == "pooled_mr") {
      const MethodResult r = pooled_mr(data, lad);
      append_method_rows(&report.rows, "pooled_mr", 0, r.per_node_beta, data,
                         opts.zero_tol);
    } else if (method == "local_mr") {
      const MethodResult r = local_mr(data, lad);
      append_method_rows(&report.rows, "local_mr", 0, r.per_node_beta, data,
                         opts.zero_tol);
    } else {
      throw std::invalid_argument("unsupported real-data method: " + method);
    }
  }

  report.aggregates = aggregate_rows(report.rows);
  if (!opts.output_dir.empty()) write_report(report, opts.output_dir);
  return report;
}

}  // namespace desmr
