#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cdfpen/solvers.hpp"

namespace cdfpen {

// Sweep grid definition mirroring the JSON config file field-for-field.
struct ExperimentConfig {
  int N = 256;
  int m = 64;
  std::vector<int> sparsity_grid = {6, 8, 10, 12, 14, 16, 18,
                                    20, 22, 24, 26, 28, 30, 32};
  int replicates = 100;
  double lambda = 1e-7;
  std::vector<std::string> penalties;  // penalty specs; "l1" is the baseline
  double success_tol = 1e-3;
  std::uint64_t master_seed = 1;
  std::string signal_dist = "gaussian";   // or "rademacher"
  std::string matrix_scale = "1/m";       // entry variance; or "unit"
  AdmmConfig admm;
  Irl1Config irl1;  // lambda field here is ignored; the sweep lambda applies

  void validate() const;
};

struct TrialRecord {
  std::string penalty_spec;
  int s = 0;
  int replicate = 0;
  std::uint64_t trial_seed = 0;
  double rel_error = 0.0;
  bool success = false;
  int outer_iters = 0;
  double wall_time = 0.0;  // seconds
};

// stable per-trial seed derivation from (master_seed, s, replicate)
std::uint64_t trial_seed(std::uint64_t master_seed, int s, int replicate);

// exactly s nonzeros on a uniformly chosen support; nonzero magnitudes
// standard normal ("gaussian") or +/-1 ("rademacher")
Eigen::VectorXd gen_sparse_signal(int N, int s, std::uint64_t seed,
                                  const std::string& dist = "gaussian");

// i.i.d. N(0, variance) entries
Eigen::MatrixXd gen_gaussian_matrix(int m, int N, std::uint64_t seed,
                                    double variance);
inline Eigen::MatrixXd gen_gaussian_matrix(int m, int N, std::uint64_t seed) {
  return gen_gaussian_matrix(m, N, seed, 1.0 / m);
}

// One record per (penalty x s x replicate); every penalty sees the identical
// (A, x, y) for a given (s, replicate) pair.  Solver failures are recorded,
// never thrown.
std::vector<TrialRecord> run_sweep(const ExperimentConfig& cfg);

double success_rate(const std::vector<TrialRecord>& records,
                    const std::string& penalty_spec, int s);

// entries j^(-exponent), j = 1..N
Eigen::VectorXd compressible_signal(int N, double exponent);

// ---- persistence ----------------------------------------------------------

ExperimentConfig load_experiment_config(const std::string& path);
std::string experiment_config_json(const ExperimentConfig& cfg);

void write_results_csv(std::ostream& out, const std::vector<TrialRecord>& records);
void write_manifest_json(std::ostream& out, const ExperimentConfig& cfg);
// per-penalty success-rate curves: penalty,s,success_rate
void write_rate_csv(std::ostream& out, const ExperimentConfig& cfg,
                    const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_results_csv(std::istream& in);

// plain-text CSV, row-major, no header
Eigen::MatrixXd read_matrix_csv(const std::string& path);
Eigen::VectorXd read_vector_csv(const std::string& path);
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& mat);

}  // namespace cdfpen
