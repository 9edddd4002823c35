#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cdfpen/harness.hpp"
#include "cdfpen/rng.hpp"

using namespace cdfpen;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.N = 32;
  cfg.m = 12;
  cfg.sparsity_grid = {2, 4};
  cfg.replicates = 3;
  cfg.penalties = {"l1", "weibull(k=1,sigma=1)"};
  cfg.master_seed = 7;
  cfg.admm.rho = 1e-5;
  cfg.admm.max_iter = 200;
  return cfg;
}

}  // namespace

TEST_CASE("trial seeds are stable and collision-free on the grid") {
  CHECK(trial_seed(42, 10, 0) == trial_seed(42, 10, 0));
  std::set<std::uint64_t> seen;
  for (int s = 1; s <= 64; ++s)
    for (int rep = 0; rep < 100; ++rep) seen.insert(trial_seed(42, s, rep));
  CHECK(seen.size() == 64u * 100u);
  CHECK(trial_seed(1, 2, 3) != trial_seed(2, 2, 3));
}

TEST_CASE("sparse signals have exactly s nonzeros and are deterministic") {
  for (int s : {1, 5, 20}) {
    const Eigen::VectorXd x = gen_sparse_signal(20, s, 11);
    int nnz = 0;
    for (int j = 0; j < 20; ++j) nnz += x[j] != 0.0 ? 1 : 0;
    CHECK(nnz == s);
    CHECK((x - gen_sparse_signal(20, s, 11)).norm() == 0.0);
  }
  CHECK((gen_sparse_signal(20, 5, 11) - gen_sparse_signal(20, 5, 12)).norm() != 0.0);
  CHECK_THROWS_AS(gen_sparse_signal(20, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_sparse_signal(20, 21, 1), std::invalid_argument);
}

TEST_CASE("sparse signal supports are uniform (chi-square)") {
  const int N = 20, s = 3, draws = 2000;
  std::vector<int> counts(N, 0);
  for (int d = 0; d < draws; ++d) {
    const Eigen::VectorXd x = gen_sparse_signal(N, s, 1000 + d);
    for (int j = 0; j < N; ++j)
      if (x[j] != 0.0) ++counts[static_cast<std::size_t>(j)];
  }
  const double expect = static_cast<double>(draws) * s / N;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
  // chi-square with 19 dof; 50 is far beyond the 0.999 quantile
  CHECK(chi2 < 50.0);
}

TEST_CASE("signal nonzero values follow the requested law") {
  std::vector<double> vals;
  for (int d = 0; d < 500; ++d) {
    const Eigen::VectorXd x = gen_sparse_signal(40, 8, 2000 + d, "gaussian");
    for (int j = 0; j < 40; ++j)
      if (x[j] != 0.0) vals.push_back(x[j]);
  }
  double mean = 0.0, var = 0.0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(vals.size());
  for (double v : vals) var += (v - mean) * (v - mean);
  var /= static_cast<double>(vals.size()) - 1.0;
  CHECK(std::abs(mean) < 0.05);
  CHECK(var == doctest::Approx(1.0).epsilon(0.1));

  const Eigen::VectorXd r = gen_sparse_signal(40, 8, 5, "rademacher");
  for (int j = 0; j < 40; ++j)
    CHECK((r[j] == 0.0 || r[j] == 1.0 || r[j] == -1.0));
}

TEST_CASE("gaussian matrices have the requested entry variance") {
  const Eigen::MatrixXd A = gen_gaussian_matrix(64, 256, 3);  // default 1/m
  const double mean = A.mean();
  const double var = (A.array() - mean).square().sum() / (A.size() - 1.0);
  CHECK(std::abs(mean) < 0.005);
  CHECK(var == doctest::Approx(1.0 / 64).epsilon(0.05));

  const Eigen::MatrixXd U = gen_gaussian_matrix(64, 256, 3, 1.0);
  const double uvar = (U.array() - U.mean()).square().sum() / (U.size() - 1.0);
  CHECK(uvar == doctest::Approx(1.0).epsilon(0.05));
  CHECK((U / 8.0 - A).norm() <= 1e-12 * A.norm());  // same draws, scaled

  CHECK_THROWS_AS(gen_gaussian_matrix(0, 4, 1), std::invalid_argument);
}

TEST_CASE("compressible signal values") {
  const Eigen::VectorXd x = compressible_signal(4, 2.0);
  CHECK(x[0] == 1.0);
  CHECK(x[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(x[2] == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  CHECK(x[3] == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK_THROWS_AS(compressible_signal(0, 2.0), std::invalid_argument);
}

TEST_CASE("run_sweep is deterministic and pairs penalties per trial") {
  const ExperimentConfig cfg = small_config();
  const auto a = run_sweep(cfg);
  const auto b = run_sweep(cfg);
  REQUIRE(a.size() == 2u * 2u * 3u);
  REQUIRE(b.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].penalty_spec == b[i].penalty_spec);
    CHECK(a[i].s == b[i].s);
    CHECK(a[i].replicate == b[i].replicate);
    CHECK(a[i].trial_seed == b[i].trial_seed);
    CHECK(a[i].rel_error == b[i].rel_error);  // bitwise, not approximate
    CHECK(a[i].success == b[i].success);
    CHECK(a[i].outer_iters == b[i].outer_iters);
  }
  // paired design: both penalties of a given (s, replicate) share the seed
  for (std::size_t i = 0; i + 1 < a.size(); i += 2) {
    CHECK(a[i].s == a[i + 1].s);
    CHECK(a[i].replicate == a[i + 1].replicate);
    CHECK(a[i].trial_seed == a[i + 1].trial_seed);
  }
  for (const auto& rec : a)
    CHECK(rec.success == (rec.rel_error <= cfg.success_tol));
}

TEST_CASE("success_rate aggregates exactly") {
  std::vector<TrialRecord> records;
  for (int rep = 0; rep < 4; ++rep) {
    TrialRecord r;
    r.penalty_spec = "l1";
    r.s = 6;
    r.replicate = rep;
    r.success = rep < 3;
    records.push_back(r);
  }
  CHECK(success_rate(records, "l1", 6) == 0.75);
  CHECK_THROWS_AS(success_rate(records, "l1", 7), std::invalid_argument);
  CHECK_THROWS_AS(success_rate(records, "weibull(k=1,sigma=1)", 6),
                  std::invalid_argument);
}

TEST_CASE("experiment config JSON round trip") {
  ExperimentConfig cfg = small_config();
  cfg.lambda = 3e-6;
  cfg.success_tol = 1e-4;
  cfg.signal_dist = "rademacher";
  cfg.matrix_scale = "unit";
  cfg.irl1.max_outer = 9;
  const std::string path = "test_harness_config_tmp.json";
  {
    std::ofstream out(path);
    out << experiment_config_json(cfg);
  }
  const ExperimentConfig back = load_experiment_config(path);
  std::remove(path.c_str());
  CHECK(back.N == cfg.N);
  CHECK(back.m == cfg.m);
  CHECK(back.sparsity_grid == cfg.sparsity_grid);
  CHECK(back.replicates == cfg.replicates);
  CHECK(back.lambda == cfg.lambda);
  CHECK(back.penalties == cfg.penalties);
  CHECK(back.success_tol == cfg.success_tol);
  CHECK(back.master_seed == cfg.master_seed);
  CHECK(back.signal_dist == cfg.signal_dist);
  CHECK(back.matrix_scale == cfg.matrix_scale);
  CHECK(back.admm.rho == cfg.admm.rho);
  CHECK(back.admm.max_iter == cfg.admm.max_iter);
  CHECK(back.irl1.max_outer == cfg.irl1.max_outer);
}

TEST_CASE("config validation rejects bad fields") {
  ExperimentConfig cfg = small_config();
  cfg.m = cfg.N;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.sparsity_grid = {0};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.sparsity_grid = {cfg.m + 1};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.penalties = {"weibull(k=nope)"};
  CHECK_THROWS_AS(cfg.validate(), SpecParseError);
  cfg = small_config();
  cfg.signal_dist = "cauchy";
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.matrix_scale = "2/m";
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("results CSV round trip preserves every field") {
  const ExperimentConfig cfg = small_config();
  const auto records = run_sweep(cfg);
  std::stringstream ss;
  write_results_csv(ss, records);
  const auto back = read_results_csv(ss);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].penalty_spec == records[i].penalty_spec);
    CHECK(back[i].s == records[i].s);
    CHECK(back[i].replicate == records[i].replicate);
    CHECK(back[i].trial_seed == records[i].trial_seed);
    CHECK(back[i].rel_error == records[i].rel_error);  // %.17g is lossless
    CHECK(back[i].success == records[i].success);
    CHECK(back[i].outer_iters == records[i].outer_iters);
    CHECK(back[i].wall_time == records[i].wall_time);
  }
  std::stringstream bad("not,the,header\n");
  CHECK_THROWS_AS(read_results_csv(bad), std::runtime_error);
}

TEST_CASE("rate CSV lists every penalty/sparsity cell") {
  const ExperimentConfig cfg = small_config();
  const auto records = run_sweep(cfg);
  std::stringstream ss;
  write_rate_csv(ss, cfg, records);
  std::string line;
  REQUIRE(std::getline(ss, line));
  CHECK(line == "penalty,s,success_rate");
  int rows = 0;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    ++rows;
    const auto c1 = line.find(','), c2 = line.rfind(',');
    REQUIRE(c1 != std::string::npos);
    REQUIRE(c2 > c1);
    const double rate = std::stod(line.substr(c2 + 1));
    CHECK(rate >= 0.0);
    CHECK(rate <= 1.0);
  }
  CHECK(rows == 4);  // 2 penalties x 2 sparsity levels
}

TEST_CASE("manifest JSON embeds the configuration") {
  std::stringstream ss;
  write_manifest_json(ss, small_config());
  const std::string text = ss.str();
  CHECK(text.find("\"version\"") != std::string::npos);
  CHECK(text.find("cdfpen") != std::string::npos);
  CHECK(text.find("\"master_seed\": 7") != std::string::npos);
  CHECK(text.find("\"timestamp\"") != std::string::npos);
}

TEST_CASE("matrix CSV round trip") {
  Rng rng(51);
  Eigen::MatrixXd M(3, 4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) M(i, j) = rng.normal();
  const std::string path = "test_harness_matrix_tmp.csv";
  {
    std::ofstream out(path);
    write_matrix_csv(out, M);
  }
  const Eigen::MatrixXd back = read_matrix_csv(path);
  std::remove(path.c_str());
  REQUIRE(back.rows() == 3);
  REQUIRE(back.cols() == 4);
  CHECK((back - M).norm() == 0.0);
}

TEST_CASE("vector CSV accepts rows and columns only") {
  const std::string path = "test_harness_vector_tmp.csv";
  {
    std::ofstream out(path);
    out << "1\n2\n3\n";
  }
  Eigen::VectorXd v = read_vector_csv(path);
  REQUIRE(v.size() == 3);
  CHECK(v[2] == 3.0);
  {
    std::ofstream out(path);
    out << "1,2,3\n";
  }
  v = read_vector_csv(path);
  REQUIRE(v.size() == 3);
  CHECK(v[1] == 2.0);
  {
    std::ofstream out(path);
    out << "1,2\n3,4\n";
  }
  CHECK_THROWS_AS(read_vector_csv(path), std::runtime_error);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_matrix_csv("no_such_file.csv"), std::runtime_error);
}
