#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "cdfpen/analysis.hpp"
#include "cdfpen/harness.hpp"
#include "cdfpen/penalties.hpp"
#include "cdfpen/rng.hpp"
#include "cdfpen/solvers.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNoConvergence = 2;

// Complete content is assembled first so a failure never leaves a partial file.
void emit(const std::string& out_path, const std::string& content, bool quiet) {
  if (out_path.empty()) {
    if (!quiet) std::cout << content;
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write to " + out_path);
    out << content;
  }
}

json result_to_json(const cdfpen::SolveResult& res) {
  json j;
  j["xhat"] = std::vector<double>(res.xhat.data(), res.xhat.data() + res.xhat.size());
  j["outer_iters"] = res.outer_iters;
  j["total_inner_iters"] = res.total_inner_iters;
  j["objective_trace"] = res.objective_trace;
  j["converged"] = res.converged;
  return j;
}

double parse_q(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  return std::stod(text);
}

struct SolveOptions {
  std::string matrix_path, y_path, penalty_spec, out_path;
  bool simulate = false;
  int N = 256, m = 64, s = 10;
  double lambda = 1e-7;
  std::uint64_t seed = 1;
  cdfpen::AdmmConfig admm;
  cdfpen::Irl1Config irl1;
};

int run_solve(const SolveOptions& opt, bool quiet) {
  Eigen::MatrixXd A;
  Eigen::VectorXd y;
  std::optional<Eigen::VectorXd> truth;
  if (opt.simulate) {
    const std::uint64_t seed = cdfpen::trial_seed(opt.seed, opt.s, 0);
    Eigen::VectorXd x = cdfpen::gen_sparse_signal(opt.N, opt.s,
                                                  cdfpen::mix_seed(seed, 1));
    A = cdfpen::gen_gaussian_matrix(opt.m, opt.N, cdfpen::mix_seed(seed, 2));
    y = A * x;
    truth = std::move(x);
  } else {
    A = cdfpen::read_matrix_csv(opt.matrix_path);
    y = cdfpen::read_vector_csv(opt.y_path);
  }
  const cdfpen::MeasurementProblem problem(std::move(A), std::move(y), truth);

  cdfpen::SolveResult res;
  if (opt.penalty_spec == "l1") {
    res = cdfpen::solve_l1(problem, opt.lambda, opt.admm);
  } else {
    cdfpen::Irl1Config icfg = opt.irl1;
    icfg.lambda = opt.lambda;
    res = cdfpen::irl1(problem, cdfpen::parse_penalty_spec(opt.penalty_spec),
                       icfg, opt.admm);
  }

  json j = result_to_json(res);
  j["penalty"] = opt.penalty_spec;
  j["lambda"] = opt.lambda;
  if (problem.truth) {
    j["rel_error"] =
        (res.xhat - *problem.truth).norm() / std::max(problem.truth->norm(), 1e-300);
  }
  emit(opt.out_path, j.dump(2) + "\n", quiet && !opt.out_path.empty());
  return res.converged ? kExitOk : kExitNoConvergence;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CDF-induced nonconvex sparse recovery toolkit"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("--quiet", quiet, "suppress standard-output reports");

  // solve ------------------------------------------------------------------
  SolveOptions sv;
  auto* solve = app.add_subcommand("solve", "solve one recovery problem");
  auto* mat_opt = solve->add_option("--matrix", sv.matrix_path, "matrix CSV (row-major, no header)");
  auto* y_opt = solve->add_option("--y", sv.y_path, "observation vector CSV");
  auto* sim_opt = solve->add_flag("--simulate", sv.simulate, "generate a seeded random instance instead of reading files");
  solve->add_option("--N", sv.N, "signal length (with --simulate)");
  solve->add_option("--m", sv.m, "measurement count (with --simulate)");
  solve->add_option("--s", sv.s, "sparsity (with --simulate)");
  solve->add_option("--penalty", sv.penalty_spec, "penalty spec, e.g. weibull(k=1,sigma=1), or l1")->required();
  solve->add_option("--lambda", sv.lambda, "regularization parameter");
  solve->add_option("--seed", sv.seed, "rng seed (with --simulate)");
  solve->add_option("--out", sv.out_path, "result JSON path (default: stdout)");
  solve->add_option("--rho", sv.admm.rho, "ADMM augmented-Lagrangian parameter");
  solve->add_option("--max-iter", sv.admm.max_iter, "ADMM iteration cap");
  solve->add_option("--max-outer", sv.irl1.max_outer, "IRL1 outer iteration cap");
  solve->add_option("--eps", sv.irl1.eps, "IRL1 weight smoothing");
  mat_opt->needs(y_opt);
  mat_opt->excludes(sim_opt);

  // sweep ------------------------------------------------------------------
  std::string sweep_config, sweep_out;
  auto* sweep = app.add_subcommand("sweep", "run a replicated benchmark sweep");
  sweep->add_option("--config", sweep_config, "experiment config JSON")->required();
  sweep->add_option("--out", sweep_out, "output directory")->required();

  // penalty ----------------------------------------------------------------
  std::string pen_spec;
  bool pen_curve = false, pen_weights = false;
  double pen_min = 0.0, pen_max = 2.0, pen_eps = 1e-8;
  int pen_points = 101;
  auto* pen = app.add_subcommand("penalty", "emit scaled penalty curves or IRL1 weights");
  pen->add_option("--spec", pen_spec, "penalty spec")->required();
  auto* curve_flag = pen->add_flag("--curve", pen_curve, "emit cdf(t)/cdf(1)");
  auto* weight_flag = pen->add_flag("--weights", pen_weights, "emit irl1 weights f(t+eps)");
  pen->add_option("--grid-min", pen_min, "grid start");
  pen->add_option("--grid-max", pen_max, "grid end");
  pen->add_option("--grid-points", pen_points, "grid size");
  pen->add_option("--eps", pen_eps, "weight smoothing (with --weights)");
  curve_flag->excludes(weight_flag);

  // measure ----------------------------------------------------------------
  std::string msr_signal, msr_family, msr_out;
  bool msr_compressible = false;
  int msr_n = 50, msr_points = 50;
  double msr_exp = 2.0, msr_tmin = 0.1, msr_tmax = 10.0, msr_shape = 1.5;
  auto* msr = app.add_subcommand("measure", "sparsity-measure sweep over theta");
  auto* sig_opt = msr->add_option("--signal", msr_signal, "signal vector CSV");
  auto* comp_flag = msr->add_flag("--compressible", msr_compressible, "use the j^(-exponent) compressible signal");
  msr->add_option("--n", msr_n, "signal length (with --compressible)");
  msr->add_option("--exponent", msr_exp, "decay exponent (with --compressible)");
  msr->add_option("--family", msr_family, "distribution family to sweep")->required();
  msr->add_option("--theta-min", msr_tmin, "theta grid start");
  msr->add_option("--theta-max", msr_tmax, "theta grid end");
  msr->add_option("--theta-points", msr_points, "theta grid size");
  msr->add_option("--weibull-shape", msr_shape, "shape k when sweeping the weibull scale");
  msr->add_option("--out", msr_out, "output CSV path (default: stdout)");
  sig_opt->excludes(comp_flag);

  // verify -----------------------------------------------------------------
  bool v_gnsp = false, v_ssp = false, v_ih = false;
  std::string v_matrix, v_penalty = "exp(sigma=1)", v_q = "inf", v_out;
  int v_s = 1, v_budget = 10000, v_grid = 4096, v_n = 12, v_samples = 100000;
  std::uint64_t v_seed = 1;
  auto* ver = app.add_subcommand("verify", "run theory-side verifiers");
  auto* gnsp_flag = ver->add_flag("--gnsp", v_gnsp, "null-space-property falsifier");
  auto* ssp_flag = ver->add_flag("--ssp", v_ssp, "spherical-section Delta_q estimate");
  auto* ih_flag = ver->add_flag("--irwin-hall", v_ih, "penalty-distribution Monte Carlo check");
  ver->add_option("--matrix", v_matrix, "matrix CSV (gnsp/ssp)");
  ver->add_option("--penalty", v_penalty, "penalty spec (gnsp/irwin-hall)");
  ver->add_option("--s", v_s, "support size (gnsp)");
  ver->add_option("--budget", v_budget, "kernel sample budget (gnsp)");
  ver->add_option("--q", v_q, "q in (1,inf], accepts 'inf' (ssp)");
  ver->add_option("--grid", v_grid, "grid size (ssp)");
  ver->add_option("--n", v_n, "signal length (irwin-hall)");
  ver->add_option("--samples", v_samples, "Monte Carlo sample count (irwin-hall)");
  ver->add_option("--seed", v_seed, "rng seed");
  ver->add_option("--out", v_out, "report JSON path (default: stdout)");
  gnsp_flag->excludes(ssp_flag)->excludes(ih_flag);
  ssp_flag->excludes(ih_flag);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the usage message; remap CLI11's exit codes
    return kExitUsage;
  }

  try {
    if (*solve) {
      if (!sv.simulate && (sv.matrix_path.empty() || sv.y_path.empty()))
        throw CLI::ValidationError("solve", "either --simulate or both --matrix and --y are required");
      return run_solve(sv, quiet);
    }

    if (*sweep) {
      const cdfpen::ExperimentConfig cfg = cdfpen::load_experiment_config(sweep_config);
      std::filesystem::create_directories(sweep_out);
      const auto records = cdfpen::run_sweep(cfg);
      {
        std::ofstream out(sweep_out + "/results.csv");
        cdfpen::write_results_csv(out, records);
      }
      {
        std::ofstream out(sweep_out + "/manifest.json");
        cdfpen::write_manifest_json(out, cfg);
      }
      {
        std::ofstream out(sweep_out + "/success_rates.csv");
        cdfpen::write_rate_csv(out, cfg, records);
      }
      if (!quiet)
        std::cout << "wrote " << records.size() << " trial records to "
                  << sweep_out << "\n";
      return kExitOk;
    }

    if (*pen) {
      const cdfpen::PenaltyModel model = cdfpen::parse_penalty_spec(pen_spec);
      Eigen::VectorXd grid =
          Eigen::VectorXd::LinSpaced(pen_points, pen_min, pen_max);
      std::ostringstream out;
      if (pen_weights) {
        out << "t,weight\n";
        for (Eigen::Index i = 0; i < grid.size(); ++i)
          out << grid[i] << ',' << cdfpen::irl1_weight(model, grid[i], pen_eps)
              << '\n';
      } else {
        const Eigen::VectorXd curve = cdfpen::scaled_penalty_curve(model, grid);
        out << "t,scaled_penalty\n";
        for (Eigen::Index i = 0; i < grid.size(); ++i)
          out << grid[i] << ',' << curve[i] << '\n';
      }
      std::cout << out.str();
      return kExitOk;
    }

    if (*msr) {
      if (msr_signal.empty() && !msr_compressible)
        throw CLI::ValidationError("measure", "either --signal or --compressible is required");
      const Eigen::VectorXd x = msr_compressible
                                    ? cdfpen::compressible_signal(msr_n, msr_exp)
                                    : cdfpen::read_vector_csv(msr_signal);
      const cdfpen::Family family = cdfpen::parse_family(msr_family);
      const Eigen::VectorXd thetas =
          Eigen::VectorXd::LinSpaced(msr_points, msr_tmin, msr_tmax);
      const Eigen::VectorXd values =
          cdfpen::sparsity_sweep(family, thetas, x, msr_shape);
      std::ostringstream out;
      out << "theta,J\n";
      for (Eigen::Index i = 0; i < thetas.size(); ++i) {
        out << thetas[i] << ',';
        if (std::isnan(values[i]))
          out << "invalid";  // per-point error marker, sweep continues
        else
          out << values[i];
        out << '\n';
      }
      emit(msr_out, out.str(), quiet && !msr_out.empty());
      return kExitOk;
    }

    if (*ver) {
      if (!v_gnsp && !v_ssp && !v_ih)
        throw CLI::ValidationError("verify", "one of --gnsp, --ssp, --irwin-hall is required");
      json report;
      if (v_gnsp) {
        const Eigen::MatrixXd A = cdfpen::read_matrix_csv(v_matrix);
        const auto model = cdfpen::parse_penalty_spec(v_penalty);
        const auto verdict = cdfpen::gnsp_falsify(A, v_s, model, v_budget, v_seed);
        report["check"] = "gnsp";
        report["penalty"] = v_penalty;
        report["s"] = v_s;
        report["budget"] = v_budget;
        report["seed"] = v_seed;
        report["samples_used"] = verdict.samples_used;
        report["verdict"] = verdict.falsified ? "FALSIFIED" : "NOT_FALSIFIED";
        report["certificate"] = false;  // NOT_FALSIFIED is evidence only
        if (verdict.falsified) {
          report["witness"] = std::vector<double>(
              verdict.witness->data(), verdict.witness->data() + verdict.witness->size());
          report["support"] = verdict.support;
        }
      } else if (v_ssp) {
        const Eigen::MatrixXd A = cdfpen::read_matrix_csv(v_matrix);
        const auto est = cdfpen::delta_q(A, parse_q(v_q), v_grid);
        report["check"] = "ssp";
        report["q"] = v_q;
        report["grid"] = v_grid;
        report["delta_q"] = std::isinf(est.value) ? json("inf") : json(est.value);
        report["upper_bound_only"] = est.upper_bound_only;
      } else {
        const auto model = cdfpen::parse_penalty_spec(v_penalty);
        const auto stats = cdfpen::irwin_hall_check(model, v_n, v_samples, v_seed);
        report["check"] = "irwin_hall";
        report["penalty"] = v_penalty;
        report["N"] = v_n;
        report["samples"] = v_samples;
        report["seed"] = v_seed;
        report["mean"] = stats.mean;
        report["variance"] = stats.variance;
        report["ks_distance"] = stats.ks_distance;
      }
      emit(v_out, report.dump(2) + "\n", quiet && !v_out.empty());
      return kExitOk;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
