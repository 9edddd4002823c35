#include "cdfpen/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cdfpen/rng.hpp"

namespace cdfpen {

namespace {

using nlohmann::json;

double entry_variance(const ExperimentConfig& cfg) {
  if (cfg.matrix_scale == "1/m") return 1.0 / cfg.m;
  if (cfg.matrix_scale == "unit") return 1.0;
  throw std::invalid_argument("ExperimentConfig: matrix_scale must be \"1/m\" or \"unit\"");
}

}  // namespace

void ExperimentConfig::validate() const {
  if (N < 1 || m < 1) throw std::invalid_argument("ExperimentConfig: N, m must be >= 1");
  if (m >= N) throw std::invalid_argument("ExperimentConfig: requires m < N");
  if (replicates < 1) throw std::invalid_argument("ExperimentConfig: replicates must be >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("ExperimentConfig: lambda must be > 0");
  if (!(success_tol > 0.0)) throw std::invalid_argument("ExperimentConfig: success_tol must be > 0");
  if (sparsity_grid.empty()) throw std::invalid_argument("ExperimentConfig: empty sparsity grid");
  for (int s : sparsity_grid)
    if (s < 1 || s > m)
      throw std::invalid_argument("ExperimentConfig: sparsity values must lie in [1,m]");
  if (penalties.empty()) throw std::invalid_argument("ExperimentConfig: no penalties");
  if (signal_dist != "gaussian" && signal_dist != "rademacher")
    throw std::invalid_argument("ExperimentConfig: signal_dist must be \"gaussian\" or \"rademacher\"");
  entry_variance(*this);
  // parse every non-baseline penalty up front so errors surface before any work
  for (const auto& spec : penalties)
    if (spec != "l1") (void)parse_penalty_spec(spec);
}

std::uint64_t trial_seed(std::uint64_t master_seed, int s, int replicate) {
  return mix_seed(master_seed, static_cast<std::uint64_t>(s),
                  static_cast<std::uint64_t>(replicate));
}

Eigen::VectorXd gen_sparse_signal(int N, int s, std::uint64_t seed,
                                  const std::string& dist) {
  if (s < 1 || s > N) throw std::invalid_argument("gen_sparse_signal: need 0 < s <= N");
  Rng rng(seed);
  std::vector<int> idx(static_cast<std::size_t>(N));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < s; ++i)
    std::swap(idx[static_cast<std::size_t>(i)],
              idx[static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(N - i))]);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
  for (int i = 0; i < s; ++i) {
    double v;
    if (dist == "rademacher") {
      v = rng.uniform() < 0.5 ? -1.0 : 1.0;
    } else {
      do { v = rng.normal(); } while (v == 0.0);
    }
    x[idx[static_cast<std::size_t>(i)]] = v;
  }
  return x;
}

Eigen::MatrixXd gen_gaussian_matrix(int m, int N, std::uint64_t seed,
                                    double variance) {
  if (m < 1 || N < 1) throw std::invalid_argument("gen_gaussian_matrix: m, N must be >= 1");
  Rng rng(seed);
  const double sd = std::sqrt(variance);
  Eigen::MatrixXd A(m, N);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < N; ++j) A(i, j) = sd * rng.normal();
  return A;
}

Eigen::VectorXd compressible_signal(int N, double exponent) {
  if (N < 1) throw std::invalid_argument("compressible_signal: N must be >= 1");
  Eigen::VectorXd x(N);
  for (int j = 0; j < N; ++j) x[j] = std::pow(j + 1.0, -exponent);
  return x;
}

std::vector<TrialRecord> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const double var = entry_variance(cfg);

  std::vector<TrialRecord> records;
  records.reserve(cfg.penalties.size() * cfg.sparsity_grid.size() *
                  static_cast<std::size_t>(cfg.replicates));

  for (int s : cfg.sparsity_grid) {
    for (int rep = 0; rep < cfg.replicates; ++rep) {
      const std::uint64_t seed = trial_seed(cfg.master_seed, s, rep);
      const Eigen::VectorXd x =
          gen_sparse_signal(cfg.N, s, mix_seed(seed, 1), cfg.signal_dist);
      const Eigen::MatrixXd A =
          gen_gaussian_matrix(cfg.m, cfg.N, mix_seed(seed, 2), var);
      const MeasurementProblem problem(A, A * x, x);
      const AdmmWorkspace ws(A, cfg.admm.rho);
      const double xnorm = x.norm();

      for (const auto& spec : cfg.penalties) {
        TrialRecord rec;
        rec.penalty_spec = spec;
        rec.s = s;
        rec.replicate = rep;
        rec.trial_seed = seed;
        const auto t0 = std::chrono::steady_clock::now();
        try {
          SolveResult res;
          if (spec == "l1") {
            res = ws.solve(A, problem.y, Eigen::VectorXd::Ones(cfg.N),
                           cfg.lambda, cfg.admm);
            rec.outer_iters = 1;
          } else {
            Irl1Config icfg = cfg.irl1;
            icfg.lambda = cfg.lambda;
            res = irl1(problem, parse_penalty_spec(spec), icfg, cfg.admm, ws);
            rec.outer_iters = res.outer_iters;
          }
          rec.rel_error = (res.xhat - x).norm() / xnorm;
          rec.success = rec.rel_error <= cfg.success_tol;
        } catch (const std::exception&) {
          rec.rel_error = std::numeric_limits<double>::infinity();
          rec.success = false;
        }
        rec.wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

double success_rate(const std::vector<TrialRecord>& records,
                    const std::string& penalty_spec, int s) {
  int total = 0, hits = 0;
  for (const auto& rec : records) {
    if (rec.penalty_spec == penalty_spec && rec.s == s) {
      ++total;
      hits += rec.success ? 1 : 0;
    }
  }
  if (total == 0)
    throw std::invalid_argument("success_rate: no records for (" + penalty_spec +
                                ", s=" + std::to_string(s) + ")");
  return static_cast<double>(hits) / total;
}

// ---- persistence ----------------------------------------------------------

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json config_to_json(const ExperimentConfig& cfg) {
  return json{{"N", cfg.N},
              {"m", cfg.m},
              {"sparsity_grid", cfg.sparsity_grid},
              {"replicates", cfg.replicates},
              {"lambda", cfg.lambda},
              {"penalties", cfg.penalties},
              {"success_tol", cfg.success_tol},
              {"master_seed", cfg.master_seed},
              {"signal_dist", cfg.signal_dist},
              {"matrix_scale", cfg.matrix_scale},
              {"admm",
               {{"rho", cfg.admm.rho},
                {"max_iter", cfg.admm.max_iter},
                {"tol_primal", cfg.admm.tol_primal},
                {"tol_dual", cfg.admm.tol_dual}}},
              {"irl1",
               {{"max_outer", cfg.irl1.max_outer},
                {"eps", cfg.irl1.eps},
                {"stop_tol", cfg.irl1.stop_tol}}}};
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j = json::parse(in);
  ExperimentConfig cfg;
  cfg.N = j.value("N", cfg.N);
  cfg.m = j.value("m", cfg.m);
  cfg.sparsity_grid = j.value("sparsity_grid", cfg.sparsity_grid);
  cfg.replicates = j.value("replicates", cfg.replicates);
  cfg.lambda = j.value("lambda", cfg.lambda);
  cfg.penalties = j.value("penalties", cfg.penalties);
  cfg.success_tol = j.value("success_tol", cfg.success_tol);
  cfg.master_seed = j.value("master_seed", cfg.master_seed);
  cfg.signal_dist = j.value("signal_dist", cfg.signal_dist);
  cfg.matrix_scale = j.value("matrix_scale", cfg.matrix_scale);
  if (j.contains("admm")) {
    const auto& a = j.at("admm");
    cfg.admm.rho = a.value("rho", cfg.admm.rho);
    cfg.admm.max_iter = a.value("max_iter", cfg.admm.max_iter);
    cfg.admm.tol_primal = a.value("tol_primal", cfg.admm.tol_primal);
    cfg.admm.tol_dual = a.value("tol_dual", cfg.admm.tol_dual);
  }
  if (j.contains("irl1")) {
    const auto& i = j.at("irl1");
    cfg.irl1.max_outer = i.value("max_outer", cfg.irl1.max_outer);
    cfg.irl1.eps = i.value("eps", cfg.irl1.eps);
    cfg.irl1.stop_tol = i.value("stop_tol", cfg.irl1.stop_tol);
  }
  cfg.validate();
  return cfg;
}

std::string experiment_config_json(const ExperimentConfig& cfg) {
  return config_to_json(cfg).dump(2);
}

void write_results_csv(std::ostream& out,
                       const std::vector<TrialRecord>& records) {
  out << "penalty,s,replicate,seed,rel_error,success,outer_iters,wall_time\n";
  for (const auto& r : records) {
    out << r.penalty_spec << ',' << r.s << ',' << r.replicate << ','
        << r.trial_seed << ',' << fmt_double(r.rel_error) << ','
        << (r.success ? 1 : 0) << ',' << r.outer_iters << ','
        << fmt_double(r.wall_time) << '\n';
  }
}

std::vector<TrialRecord> read_results_csv(std::istream& in) {
  std::vector<TrialRecord> records;
  std::string line;
  if (!std::getline(in, line) ||
      line != "penalty,s,replicate,seed,rel_error,success,outer_iters,wall_time")
    throw std::runtime_error("results CSV: bad header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    // the penalty spec may itself contain commas ("weibull(k=1,sigma=1)"),
    // so split off the seven comma-free numeric fields from the right
    std::vector<std::size_t> commas;
    for (std::size_t i = 0; i < line.size(); ++i)
      if (line[i] == ',') commas.push_back(i);
    if (commas.size() < 7) throw std::runtime_error("results CSV: short row");
    const std::size_t split = commas[commas.size() - 7];
    TrialRecord r;
    r.penalty_spec = line.substr(0, split);
    std::stringstream ss(line.substr(split + 1));
    std::string field;
    std::getline(ss, field, ','); r.s = std::stoi(field);
    std::getline(ss, field, ','); r.replicate = std::stoi(field);
    std::getline(ss, field, ','); r.trial_seed = std::stoull(field);
    std::getline(ss, field, ','); r.rel_error = std::stod(field);
    std::getline(ss, field, ','); r.success = field == "1";
    std::getline(ss, field, ','); r.outer_iters = std::stoi(field);
    if (!std::getline(ss, field, ',')) throw std::runtime_error("results CSV: short row");
    r.wall_time = std::stod(field);
    records.push_back(std::move(r));
  }
  return records;
}

void write_manifest_json(std::ostream& out, const ExperimentConfig& cfg) {
  char stamp[32];
  const std::time_t now = std::time(nullptr);
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  json manifest{{"config", config_to_json(cfg)},
                {"version", "cdfpen 0.1.0"},
                {"timestamp", stamp}};
  out << manifest.dump(2) << '\n';
}

void write_rate_csv(std::ostream& out, const ExperimentConfig& cfg,
                    const std::vector<TrialRecord>& records) {
  out << "penalty,s,success_rate\n";
  for (const auto& spec : cfg.penalties)
    for (int s : cfg.sparsity_grid)
      out << spec << ',' << s << ','
          << fmt_double(success_rate(records, spec, s)) << '\n';
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) row.push_back(std::stod(field));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("ragged matrix CSV: " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty matrix CSV: " + path);
  Eigen::MatrixXd mat(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < mat.rows(); ++i)
    for (Eigen::Index j = 0; j < mat.cols(); ++j)
      mat(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return mat;
}

Eigen::VectorXd read_vector_csv(const std::string& path) {
  Eigen::MatrixXd mat = read_matrix_csv(path);
  if (mat.cols() == 1) return mat.col(0);
  if (mat.rows() == 1) return mat.row(0).transpose();
  throw std::runtime_error("expected a vector (one row or one column): " + path);
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& mat) {
  for (Eigen::Index i = 0; i < mat.rows(); ++i) {
    for (Eigen::Index j = 0; j < mat.cols(); ++j) {
      if (j) out << ',';
      out << fmt_double(mat(i, j));
    }
    out << '\n';
  }
}

}  // namespace cdfpen
