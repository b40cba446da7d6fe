#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "desmr/topology.hpp"
#include "desmr/types.hpp"

namespace desmr {

/// AR(1) covariance: Sigma_ij = sigma2 * rho^|i-j|, positive definite for
/// rho in [0,1).
struct CovSpec {
  double sigma2 = 1.0;
  double rho = 0.1;
};

Matrix ar1_covariance(int p, const CovSpec& cov);

struct NoiseSpec {
  enum class Family { normal, exponential, cauchy, student_t };
  Family family = Family::normal;
  double a = 0.0;  // normal mu / cauchy loc
  double b = 1.0;  // normal sigma / cauchy scale
  double rate = 1.0;
  int df = 1;

  static NoiseSpec normal(double mu, double sigma);
  static NoiseSpec exponential(double rate);
  static NoiseSpec cauchy(double loc, double scale);
  static NoiseSpec student_t(int df);
  static NoiseSpec none() { return normal(0.0, 0.0); }
};

/// One node's local sample. X_test/y_test are empty unless a held-out
/// split was requested.
struct NodeDataset {
  Matrix X;
  Vector y;
  Matrix X_test;
  Vector y_test;

  Index n() const { return X.rows(); }
  bool has_test() const { return X_test.rows() > 0; }
};

struct NetworkDataset {
  std::vector<NodeDataset> nodes;
  std::optional<Vector> beta_star;
  std::vector<int> support;  // indices of nonzero beta_star entries
  std::vector<CovSpec> node_cov;     // generation metadata (synthetic data)
  std::vector<NoiseSpec> node_noise;

  int m() const { return static_cast<int>(nodes.size()); }
  Index p() const { return nodes.empty() ? 0 : nodes.front().X.cols(); }
  Index total_rows() const;
};

/// How per-node covariate / noise distributions are assigned.
struct CovMode {
  bool per_node_random = false;  // sigma2 from {1,3}, rho from {0.1,0.3}
  CovSpec spec;                  // used when homogeneous
  static CovMode homogeneous(const CovSpec& s) { return {false, s}; }
  static CovMode random_per_node() { return {true, {}}; }
};

struct NoiseMode {
  bool per_node_random = false;  // one of N(0,1), Exp(1), Cauchy(0,1), t(1)
  NoiseSpec spec;
  static NoiseMode homogeneous(const NoiseSpec& s) { return {false, s}; }
  static NoiseMode random_per_node() { return {true, {}}; }
};

/// Sparse coefficient (1, 2, ..., s, 0, ..., 0) of length p.
Vector default_beta_star(int p, int s);

/// n i.i.d. rows from N(0, Sigma) via the Cholesky factor of Sigma.
/// Throws if the factorization fails (invalid CovSpec).
Matrix gen_covariates(int n, int p, const CovSpec& cov, std::uint64_t seed);

Vector sample_noise(const NoiseSpec& spec, int n, std::uint64_t seed);

/// Synthetic network sample: node j draws X from its assigned covariance,
/// eps from its assigned noise, and sets y = X beta_star + eps. Per-node
/// streams are derived from (seed, j); identical inputs give bit-identical
/// output.
NetworkDataset gen_network_data(int m, int n, int p, const Vector& beta_star,
                                const CovMode& cov_mode,
                                const NoiseMode& noise_mode,
                                std::uint64_t seed);

struct OutlierScenario {
  enum class Kind { none, balanced, attacker_node };
  Kind kind = Kind::none;
  double fraction = 1.0 / 9.0;     // of local (balanced) / total (attacker)
  double response_value = 12.0;

  static OutlierScenario none() { return {}; }
  static OutlierScenario balanced(double fraction = 1.0 / 9.0);
  static OutlierScenario attacker(double fraction = 1.0 / 9.0);
};

struct InjectionResult {
  NetworkDataset data;
  std::optional<Topology> topology;  // set for attacker_node scenarios
};

/// Returns a contaminated copy; the input is never mutated and its rows are
/// a prefix of the output rows. balanced appends ceil(n_j * fraction)
/// outlier rows to every node; attacker_node appends one new node holding
/// ceil(total * fraction) outlier rows and augments `base` with a node
/// connected to all others (base required in that case). Outlier rows have
/// i.i.d. N(0,1) covariates and a fixed response.
InjectionResult inject_outliers(const NetworkDataset& data,
                                const OutlierScenario& scenario,
                                std::uint64_t seed,
                                const Topology* base = nullptr);

/// Redistributes all rows of `data` evenly over m nodes (remainder rows go
/// to the last node). Used for node-count sweeps where the pooled sample
/// is held fixed while the network size varies.
NetworkDataset repartition(const NetworkDataset& data, int m);

/// Writes one CSV per node plus manifest.json (m, per-node n, p, beta_star
/// when synthetic, seed).
void save_network_dataset(const NetworkDataset& data, const std::string& dir,
                          std::uint64_t seed);

}  // namespace desmr
