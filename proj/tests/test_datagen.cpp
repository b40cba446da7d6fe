#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "desmr/csv.hpp"
#include "desmr/datagen.hpp"
#include "desmr/rng.hpp"
#include "doctest.h"

using namespace desmr;

namespace {

double sample_median(Vector v) {
  std::sort(v.begin(), v.end());
  const Index n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double sample_quantile(Vector v, double q) {
  std::sort(v.begin(), v.end());
  const Index i = static_cast<Index>(q * (v.size() - 1));
  return v[i];
}

void write_fixture_csv(const std::string& path) {
  std::ofstream out(path);
  out << "id,grp,a,b,c,resp\n";
  // column c is constant; row 5 has a missing cell; id is non-numeric
  for (int i = 0; i < 40; ++i) {
    out << "row" << i << "," << (i % 2 == 0 ? "east" : "west") << ",";
    if (i == 5)
      out << "?";
    else
      out << (i * 0.25);
    out << "," << (i % 7) << ",3.5," << (i * 0.5 + 1) << "\n";
  }
}

}  // namespace

TEST_SUITE("datagen") {

TEST_CASE("ar1 covariance shape") {
  const Matrix sigma = ar1_covariance(4, {2.0, 0.5});
  CHECK(sigma(0, 0) == doctest::Approx(2.0));
  CHECK(sigma(0, 1) == doctest::Approx(1.0));
  CHECK(sigma(0, 3) == doctest::Approx(0.25));
  CHECK((sigma - sigma.transpose()).norm() == 0.0);
  CHECK_THROWS(ar1_covariance(3, {0.0, 0.1}));
  CHECK_THROWS(ar1_covariance(3, {1.0, 1.0}));
}

TEST_CASE("covariate moments: univariate variance") {
  const int n = 20000;
  const Matrix x = gen_covariates(n, 1, {1.0, 0.0}, 42);
  const double mean = x.col(0).mean();
  const double var = (x.col(0).array() - mean).square().sum() / (n - 1);
  CHECK(std::abs(var - 1.0) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("covariate moments: independence at rho=0") {
  const int n = 20000;
  const Matrix x = gen_covariates(n, 3, {1.0, 0.0}, 7);
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      const double cov = (x.col(a).array() * x.col(b).array()).sum() / n;
      CHECK(std::abs(cov) < 3.0 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("covariate moments: adjacent correlation at rho=0.1") {
  const int n = 100000;
  const Matrix x = gen_covariates(n, 10, {1.0, 0.1}, 11);
  const double cov12 = (x.col(0).array() * x.col(1).array()).sum() / n;
  CHECK(std::abs(cov12 - 0.1) < 0.02);
}

TEST_CASE("noise families hit their textbook summaries") {
  const int n = 100000;
  const Vector normal = sample_noise(NoiseSpec::normal(0, 1), n, 1);
  CHECK(std::abs(sample_median(normal)) < 3.0 / std::sqrt(n));

  const Vector expo = sample_noise(NoiseSpec::exponential(1.0), n, 2);
  CHECK(std::abs(expo.mean() - 1.0) < 3.0 / std::sqrt(n));
  CHECK(expo.minCoeff() >= 0.0);

  const Vector cauchy = sample_noise(NoiseSpec::cauchy(0, 1), n, 3);
  CHECK(std::abs(sample_median(cauchy)) < 3.0 / std::sqrt(n));
  const double iqr =
      sample_quantile(cauchy, 0.75) - sample_quantile(cauchy, 0.25);
  CHECK(iqr == doctest::Approx(2.0).epsilon(0.10));  // quartiles at +-1

  // t(1) is Cauchy in distribution
  const Vector t1 = sample_noise(NoiseSpec::student_t(1), n, 4);
  CHECK(std::abs(sample_median(t1)) < 3.0 / std::sqrt(n));
  const double t_iqr = sample_quantile(t1, 0.75) - sample_quantile(t1, 0.25);
  CHECK(t_iqr == doctest::Approx(2.0).epsilon(0.10));
}

TEST_CASE("noise sampling is deterministic per seed") {
  const Vector a = sample_noise(NoiseSpec::cauchy(0, 1), 50, 9);
  const Vector b = sample_noise(NoiseSpec::cauchy(0, 1), 50, 9);
  const Vector c = sample_noise(NoiseSpec::cauchy(0, 1), 50, 10);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("network data: zero noise gives exact linear responses") {
  const Vector beta = default_beta_star(6, 2);
  const NetworkDataset data = gen_network_data(
      3, 20, 6, beta, CovMode::homogeneous({1.0, 0.1}),
      NoiseMode::homogeneous(NoiseSpec::none()), 5);
  for (const auto& node : data.nodes)
    CHECK((node.y - node.X * beta).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("network data: default coefficient and support") {
  const Vector beta = default_beta_star(100, 10);
  const NetworkDataset data = gen_network_data(
      2, 5, 100, beta, CovMode::homogeneous({1.0, 0.1}),
      NoiseMode::homogeneous(NoiseSpec::normal(0, 1)), 1);
  CHECK(data.support.size() == 10);
  for (int i = 0; i < 10; ++i) {
    CHECK(data.support[i] == i);
    CHECK((*data.beta_star)[i] == doctest::Approx(i + 1.0));
  }
}

TEST_CASE("per-node random draws stay on the two-point grids") {
  const NetworkDataset data = gen_network_data(
      40, 4, 5, default_beta_star(5, 2), CovMode::random_per_node(),
      NoiseMode::random_per_node(), 77);
  std::set<double> sigmas, rhos;
  std::set<int> families;
  for (int j = 0; j < data.m(); ++j) {
    sigmas.insert(data.node_cov[j].sigma2);
    rhos.insert(data.node_cov[j].rho);
    families.insert(static_cast<int>(data.node_noise[j].family));
  }
  for (double s : sigmas) CHECK((s == 1.0 || s == 3.0));
  for (double r : rhos) CHECK((r == 0.1 || r == 0.3));
  CHECK(sigmas.size() == 2);  // both values appear across 40 nodes
  CHECK(rhos.size() == 2);
  CHECK(families.size() >= 3);
}

TEST_CASE("residual mean at homogeneous normal noise") {
  const int m = 5, n = 400;
  const double sigma = 1.0;
  const Vector beta = default_beta_star(10, 3);
  const NetworkDataset data = gen_network_data(
      m, n, 10, beta, CovMode::homogeneous({1.0, 0.1}),
      NoiseMode::homogeneous(NoiseSpec::normal(0, sigma)), 123);
  double sum = 0.0;
  for (const auto& node : data.nodes) sum += (node.y - node.X * beta).sum();
  const double mean = sum / (m * n);
  CHECK(std::abs(mean) < 4.0 * sigma / std::sqrt(static_cast<double>(m * n)));
}

TEST_CASE("network generation is bit-deterministic") {
  auto make = [] {
    return gen_network_data(4, 10, 8, default_beta_star(8, 2),
                            CovMode::random_per_node(),
                            NoiseMode::random_per_node(), 314);
  };
  const NetworkDataset a = make(), b = make();
  for (int j = 0; j < a.m(); ++j) {
    CHECK(a.nodes[j].X == b.nodes[j].X);
    CHECK(a.nodes[j].y == b.nodes[j].y);
  }
}

TEST_CASE("balanced injection appends ceil(n/9) rows of fixed response") {
  const NetworkDataset data = gen_network_data(
      3, 180, 4, default_beta_star(4, 2), CovMode::homogeneous({1.0, 0.1}),
      NoiseMode::homogeneous(NoiseSpec::normal(0, 1)), 8);
  const InjectionResult injected =
      inject_outliers(data, OutlierScenario::balanced(), 99);
  CHECK_FALSE(injected.topology.has_value());
  for (int j = 0; j < 3; ++j) {
    const auto& before = data.nodes[j];
    const auto& after = injected.data.nodes[j];
    REQUIRE(after.n() == 200);  // 180 + ceil(180/9)
    // original rows untouched, as a prefix
    CHECK(after.X.topRows(180) == before.X);
    CHECK(after.y.head(180) == before.y);
    for (int i = 180; i < 200; ++i) CHECK(after.y[i] == 12.0);
  }
}

TEST_CASE("zero fraction leaves the dataset unchanged") {
  const NetworkDataset data = gen_network_data(
      2, 10, 3, default_beta_star(3, 1), CovMode::homogeneous({1.0, 0.1}),
      NoiseMode::homogeneous(NoiseSpec::normal(0, 1)), 8);
  const InjectionResult out =
      inject_outliers(data, OutlierScenario::balanced(0.0), 1);
  for (int j = 0; j < 2; ++j) {
    CHECK(out.data.nodes[j].X == data.nodes[j].X);
    CHECK(out.data.nodes[j].y == data.nodes[j].y);
  }
}

TEST_CASE("attacker node joins fully connected with 1:9 of total rows") {
  const NetworkDataset data = gen_network_data(
      9, 90, 4, default_beta_star(4, 2), CovMode::homogeneous({1.0, 0.1}),
      NoiseMode::homogeneous(NoiseSpec::normal(0, 1)), 3);
  const Topology topo = gen_erdos_renyi(9, 0.5, 4);
  const InjectionResult injected =
      inject_outliers(data, OutlierScenario::attacker(), 99, &topo);
  REQUIRE(injected.topology.has_value());
  CHECK(injected.data.m() == 10);
  CHECK(injected.topology->m == 10);
  CHECK(injected.topology->degrees[9] == 9);
  CHECK(injected.data.nodes[9].n() == 90);  // ceil(810/9)
  CHECK((injected.data.nodes[9].y.array() == 12.0).all());
  // input untouched
  CHECK(data.m() == 9);
}

TEST_CASE("repartition preserves rows and splits evenly") {
  const NetworkDataset one = gen_network_data(
      1, 100, 5, default_beta_star(5, 2), CovMode::homogeneous({1.0, 0.1}),
      NoiseMode::homogeneous(NoiseSpec::normal(0, 1)), 6);
  const NetworkDataset four = repartition(one, 4);
  CHECK(four.m() == 4);
  CHECK(four.total_rows() == 100);
  for (const auto& node : four.nodes) CHECK(node.n() == 25);
  CHECK(four.nodes[0].X == one.nodes[0].X.topRows(25));
}

TEST_CASE("dataset directory export") {
  const NetworkDataset data = gen_network_data(
      2, 6, 3, default_beta_star(3, 1), CovMode::homogeneous({1.0, 0.1}),
      NoiseMode::homogeneous(NoiseSpec::normal(0, 1)), 21);
  const std::string dir = "datagen_export_test";
  save_network_dataset(data, dir, 21);
  CHECK(std::filesystem::exists(dir + "/node_1.csv"));
  CHECK(std::filesystem::exists(dir + "/node_2.csv"));
  CHECK(std::filesystem::exists(dir + "/manifest.json"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("csv loader: cleaning, split, and standardization") {
  const std::string path = "csv_loader_test.csv";
  write_fixture_csv(path);
  CsvLoadOptions opts;
  opts.response_column = "resp";
  opts.group_column = "grp";
  opts.seed = 12;
  const CsvLoadResult loaded = load_csv(path, opts);

  CHECK(loaded.rows_used == 39);  // one missing row dropped
  CHECK(loaded.group_labels == std::vector<std::string>{"east", "west"});
  CHECK(loaded.feature_names == std::vector<std::string>{"a", "b"});
  REQUIRE(loaded.dropped_columns.size() == 2);  // id non-numeric, c constant

  const NetworkDataset& data = loaded.data;
  REQUIRE(data.m() == 2);
  // train means ~0 and variances ~1, pooled over training rows
  Index n_train = 0;
  Vector mean = Vector::Zero(2), sq = Vector::Zero(2);
  for (const auto& node : data.nodes) {
    CHECK(node.has_test());
    for (Index i = 0; i < node.n(); ++i) {
      mean += node.X.row(i);
      ++n_train;
    }
  }
  mean /= static_cast<double>(n_train);
  for (const auto& node : data.nodes)
    for (Index i = 0; i < node.n(); ++i)
      sq += (node.X.row(i).transpose() - mean).array().square().matrix();
  const Vector var = sq / static_cast<double>(n_train - 1);
  CHECK(mean.lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK((var.array() - 1.0).abs().maxCoeff() < 1e-10);

  // deterministic reload
  const CsvLoadResult again = load_csv(path, opts);
  std::remove(path.c_str());
  for (int j = 0; j < 2; ++j) {
    CHECK(again.data.nodes[j].X == data.nodes[j].X);
    CHECK(again.data.nodes[j].y_test == data.nodes[j].y_test);
  }
}

TEST_CASE("csv loader: group remapping through a lookup table") {
  const std::string path = "csv_map_test.csv";
  const std::string map_path = "csv_map_table.csv";
  {
    std::ofstream out(path);
    out << "grp,a,resp\n";
    for (int i = 0; i < 30; ++i)
      out << (i % 3 + 1) << "," << (i * 0.1) << "," << i << "\n";
  }
  {
    std::ofstream out(map_path);
    out << "# key,group\n1,left\n2,left\n3,right\n";
  }
  CsvLoadOptions opts;
  opts.response_column = "resp";
  opts.group_column = "grp";
  opts.group_map_csv = map_path;
  const CsvLoadResult loaded = load_csv(path, opts);
  std::remove(path.c_str());
  std::remove(map_path.c_str());
  CHECK(loaded.group_labels == std::vector<std::string>{"left", "right"});
  CHECK(loaded.data.nodes[0].n() + loaded.data.nodes[0].X_test.rows() == 20);
}

TEST_CASE("rng student-t with many dof approaches normal spread") {
  Rng rng(5);
  double sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double t = rng.student_t(50);  // variance df/(df-2)
    sq += t * t;
  }
  CHECK(sq / n == doctest::Approx(50.0 / 48.0).epsilon(0.05));
}

}  // TEST_SUITE
