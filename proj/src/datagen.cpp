#include "desmr/datagen.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "desmr/rng.hpp"

namespace desmr {

Matrix ar1_covariance(int p, const CovSpec& cov) {
  if (cov.sigma2 <= 0.0) throw std::invalid_argument("sigma2 must be > 0");
  if (cov.rho < 0.0 || cov.rho >= 1.0)
    throw std::invalid_argument("rho must be in [0, 1)");
  Matrix sigma(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      sigma(i, j) = cov.sigma2 * std::pow(cov.rho, std::abs(i - j));
  return sigma;
}

NoiseSpec NoiseSpec::normal(double mu, double sigma) {
  NoiseSpec s;
  s.family = Family::normal;
  s.a = mu;
  s.b = sigma;
  if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  return s;
}

NoiseSpec NoiseSpec::exponential(double rate) {
  if (rate <= 0.0) throw std::invalid_argument("rate must be > 0");
  NoiseSpec s;
  s.family = Family::exponential;
  s.rate = rate;
  return s;
}

NoiseSpec NoiseSpec::cauchy(double loc, double scale) {
  if (scale <= 0.0) throw std::invalid_argument("scale must be > 0");
  NoiseSpec s;
  s.family = Family::cauchy;
  s.a = loc;
  s.b = scale;
  return s;
}

NoiseSpec NoiseSpec::student_t(int df) {
  if (df < 1) throw std::invalid_argument("df must be >= 1");
  NoiseSpec s;
  s.family = Family::student_t;
  s.df = df;
  return s;
}

Index NetworkDataset::total_rows() const {
  Index total = 0;
  for (const auto& node : nodes) total += node.n();
  return total;
}

Vector default_beta_star(int p, int s) {
  if (s > p) throw std::invalid_argument("sparsity exceeds dimension");
  Vector beta = Vector::Zero(p);
  for (int i = 0; i < s; ++i) beta[i] = i + 1;
  return beta;
}

Matrix gen_covariates(int n, int p, const CovSpec& cov, std::uint64_t seed) {
  if (n < 1 || p < 1) throw std::invalid_argument("need n, p >= 1");
  const Matrix sigma = ar1_covariance(p, cov);
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("covariance factorization failed");
  const Matrix chol_lower = llt.matrixL();

  Rng rng(seed);
  Matrix z(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) z(i, j) = rng.normal();
  return z * chol_lower.transpose();
}

Vector sample_noise(const NoiseSpec& spec, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need n >= 1");
  Rng rng(seed);
  Vector eps(n);
  switch (spec.family) {
    case NoiseSpec::Family::normal:
      for (int i = 0; i < n; ++i) eps[i] = rng.normal(spec.a, spec.b);
      break;
    case NoiseSpec::Family::exponential:
      for (int i = 0; i < n; ++i) eps[i] = rng.exponential(spec.rate);
      break;
    case NoiseSpec::Family::cauchy:
      for (int i = 0; i < n; ++i) eps[i] = rng.cauchy(spec.a, spec.b);
      break;
    case NoiseSpec::Family::student_t:
      for (int i = 0; i < n; ++i) eps[i] = rng.student_t(spec.df);
      break;
  }
  return eps;
}

namespace {

CovSpec draw_cov_spec(Rng& rng) {
  CovSpec c;
  c.sigma2 = rng.uniform() < 0.5 ? 1.0 : 3.0;
  c.rho = rng.uniform() < 0.5 ? 0.1 : 0.3;
  return c;
}

NoiseSpec draw_noise_spec(Rng& rng) {
  switch (rng.uniform_int(4)) {
    case 0: return NoiseSpec::normal(0.0, 1.0);
    case 1: return NoiseSpec::exponential(1.0);
    case 2: return NoiseSpec::cauchy(0.0, 1.0);
    default: return NoiseSpec::student_t(1);
  }
}

}  // namespace

NetworkDataset gen_network_data(int m, int n, int p, const Vector& beta_star,
                                const CovMode& cov_mode,
                                const NoiseMode& noise_mode,
                                std::uint64_t seed) {
  if (beta_star.size() != p)
    throw std::invalid_argument("beta_star length must equal p");

  NetworkDataset data;
  data.nodes.resize(m);
  data.beta_star = beta_star;
  for (int i = 0; i < p; ++i)
    if (beta_star[i] != 0.0) data.support.push_back(i);

  for (int j = 0; j < m; ++j) {
    const std::uint64_t node_seed = derive_seed(seed, j);
    Rng choice_rng(derive_seed(node_seed, 0));
    const CovSpec cov =
        cov_mode.per_node_random ? draw_cov_spec(choice_rng) : cov_mode.spec;
    const NoiseSpec noise = noise_mode.per_node_random
                                ? draw_noise_spec(choice_rng)
                                : noise_mode.spec;
    data.node_cov.push_back(cov);
    data.node_noise.push_back(noise);

    NodeDataset& node = data.nodes[j];
    node.X = gen_covariates(n, p, cov, derive_seed(node_seed, 1));
    const Vector eps = sample_noise(noise, n, derive_seed(node_seed, 2));
    node.y = node.X * beta_star + eps;
    if (!node.y.allFinite() || !node.X.allFinite())
      throw std::runtime_error("non-finite entries in generated data");
  }
  return data;
}

OutlierScenario OutlierScenario::balanced(double fraction) {
  OutlierScenario s;
  s.kind = Kind::balanced;
  s.fraction = fraction;
  return s;
}

OutlierScenario OutlierScenario::attacker(double fraction) {
  OutlierScenario s;
  s.kind = Kind::attacker_node;
  s.fraction = fraction;
  return s;
}

namespace {

NodeDataset make_outlier_rows(int count, int p, double response,
                              std::uint64_t seed) {
  Rng rng(seed);
  NodeDataset node;
  node.X.resize(count, p);
  node.y.resize(count);
  for (int i = 0; i < count; ++i) {
    for (int c = 0; c < p; ++c) node.X(i, c) = rng.normal();
    node.y[i] = response;
  }
  return node;
}

}  // namespace

InjectionResult inject_outliers(const NetworkDataset& data,
                                const OutlierScenario& scenario,
                                std::uint64_t seed, const Topology* base) {
  InjectionResult result;
  result.data = data;
  if (scenario.kind == OutlierScenario::Kind::none || scenario.fraction <= 0.0)
    return result;

  const int p = static_cast<int>(data.p());
  if (scenario.kind == OutlierScenario::Kind::balanced) {
    for (int j = 0; j < data.m(); ++j) {
      const int extra = static_cast<int>(
          std::ceil(scenario.fraction * static_cast<double>(data.nodes[j].n())));
      if (extra == 0) continue;
      const NodeDataset rows = make_outlier_rows(
          extra, p, scenario.response_value, derive_seed(seed, j));
      NodeDataset& node = result.data.nodes[j];
      const Index n0 = node.n();
      node.X.conservativeResize(n0 + extra, Eigen::NoChange);
      node.y.conservativeResize(n0 + extra);
      node.X.bottomRows(extra) = rows.X;
      node.y.tail(extra) = rows.y;
    }
    return result;
  }

  // attacker_node: one new node of pure outlier rows, linked to everyone
  if (base == nullptr)
    throw std::invalid_argument("attacker scenario needs the base topology");
  Index total_train = 0;
  for (const auto& node : data.nodes) total_train += node.n();
  const int extra = static_cast<int>(
      std::ceil(scenario.fraction * static_cast<double>(total_train)));
  result.data.nodes.push_back(make_outlier_rows(
      extra, p, scenario.response_value, derive_seed(seed, data.m())));
  result.topology = add_fully_connected_node(*base);
  return result;
}

NetworkDataset repartition(const NetworkDataset& data, int m) {
  const Index total = data.total_rows();
  if (m < 1 || total < m)
    throw std::invalid_argument("cannot split rows over that many nodes");
  const Index p = data.p();
  Matrix X(total, p);
  Vector y(total);
  Index at = 0;
  for (const auto& node : data.nodes) {
    X.middleRows(at, node.n()) = node.X;
    y.segment(at, node.n()) = node.y;
    at += node.n();
  }

  NetworkDataset out;
  out.beta_star = data.beta_star;
  out.support = data.support;
  out.nodes.resize(m);
  const Index chunk = total / m;
  at = 0;
  for (int j = 0; j < m; ++j) {
    const Index rows = j + 1 == m ? total - at : chunk;
    out.nodes[j].X = X.middleRows(at, rows);
    out.nodes[j].y = y.segment(at, rows);
    at += rows;
  }
  return out;
}

namespace {

void write_node_csv(const std::string& path, const NodeDataset& node,
                    bool test_rows) {
  std::ofstream out(path);
  const Matrix& X = test_rows ? node.X_test : node.X;
  const Vector& y = test_rows ? node.y_test : node.y;
  out << "y";
  for (Index c = 0; c < X.cols(); ++c) out << ",x" << (c + 1);
  out << "\n";
  out.precision(17);
  for (Index i = 0; i < X.rows(); ++i) {
    out << y[i];
    for (Index c = 0; c < X.cols(); ++c) out << "," << X(i, c);
    out << "\n";
  }
}

}  // namespace

void save_network_dataset(const NetworkDataset& data, const std::string& dir,
                          std::uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  nlohmann::ordered_json manifest;
  manifest["m"] = data.m();
  manifest["p"] = data.p();
  manifest["seed"] = seed;
  std::vector<Index> sizes;
  for (const auto& node : data.nodes) sizes.push_back(node.n());
  manifest["n_per_node"] = sizes;
  if (data.beta_star) {
    std::vector<double> beta(data.beta_star->begin(), data.beta_star->end());
    manifest["beta_star"] = beta;
  }

  for (int j = 0; j < data.m(); ++j) {
    const std::string stem = dir + "/node_" + std::to_string(j + 1);
    write_node_csv(stem + ".csv", data.nodes[j], false);
    if (data.nodes[j].has_test())
      write_node_csv(stem + "_test.csv", data.nodes[j], true);
  }
  std::ofstream(dir + "/manifest.json") << manifest.dump(2) << "\n";
}

}  // namespace desmr
