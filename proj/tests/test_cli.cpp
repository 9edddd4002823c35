#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string g_driver;  // path to the cdfpen binary, from argv[1]

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// run the driver with the given arguments, capturing exit code and streams
RunResult run(const std::string& args) {
  const std::string out_path = "cli_stdout.tmp";
  const std::string err_path = "cli_stderr.tmp";
  const std::string cmd =
      "'" + g_driver + "' " + args + " > " + out_path + " 2> " + err_path;
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

bool exists(const std::string& path) { return std::ifstream(path).good(); }

// split a CSV body (after the header) into lines
std::vector<std::string> body_lines(const std::string& csv) {
  std::vector<std::string> lines;
  std::stringstream ss(csv);
  std::string line;
  bool first = true;
  while (std::getline(ss, line)) {
    if (first) {
      first = false;
      continue;
    }
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

TEST_CASE("usage errors exit with code 1") {
  CHECK(run("").code == 1);                       // missing subcommand
  CHECK(run("frobnicate").code == 1);             // unknown subcommand
  CHECK(run("solve").code == 1);                  // missing --penalty
  CHECK(run("solve --penalty l1").code == 1);     // neither files nor --simulate
  CHECK(run("sweep --config missing.json --out sweep_dir").code == 1);
  const auto bad_spec = run("solve --simulate --penalty 'weibull(k=oops)'");
  CHECK(bad_spec.code == 1);
  CHECK(bad_spec.err.find("error") != std::string::npos);
}

TEST_CASE("help exits with code 0") {
  CHECK(run("--help").code == 0);
  CHECK(run("solve --help").code == 0);
}

TEST_CASE("non-concave penalties are refused with a usage error") {
  const auto r = run("solve --simulate --s 4 --penalty 'weibull(k=2,sigma=1)'");
  CHECK(r.code == 1);
  CHECK(r.err.find("out of scope") != std::string::npos);
}

TEST_CASE("solve --simulate recovers and reports rel_error") {
  const auto r = run(
      "solve --simulate --N 64 --m 24 --s 4 --penalty 'weibull(k=1,sigma=1)' "
      "--lambda 1e-7 --rho 1e-5 --max-iter 400 --seed 3 --out cli_solve.json");
  CHECK(r.code == 0);
  const std::string text = slurp("cli_solve.json");
  CHECK(text.find("\"rel_error\"") != std::string::npos);
  CHECK(text.find("\"converged\": true") != std::string::npos);
  // rel_error value is tiny: locate it and parse
  const auto pos = text.find("\"rel_error\":");
  REQUIRE(pos != std::string::npos);
  const double rel = std::strtod(text.c_str() + pos + 12, nullptr);
  CHECK(rel <= 1e-3);
  std::remove("cli_solve.json");
}

TEST_CASE("solve is bit-deterministic for a fixed seed") {
  const std::string args =
      "solve --simulate --N 64 --m 24 --s 4 --penalty l1 "
      "--lambda 1e-7 --rho 1e-5 --max-iter 300 --seed 11";
  const auto a = run(args + " --out cli_det_a.json");
  const auto b = run(args + " --out cli_det_b.json");
  CHECK(a.code == b.code);
  CHECK(slurp("cli_det_a.json") == slurp("cli_det_b.json"));
  std::remove("cli_det_a.json");
  std::remove("cli_det_b.json");
}

TEST_CASE("non-convergence exits with code 2 but still writes the result") {
  const auto r = run(
      "solve --simulate --N 64 --m 24 --s 4 --penalty l1 --lambda 1e-7 "
      "--rho 1e-5 --max-iter 3 --out cli_noconv.json");
  CHECK(r.code == 2);
  CHECK(slurp("cli_noconv.json").find("\"converged\": false") != std::string::npos);
  std::remove("cli_noconv.json");
}

TEST_CASE("usage errors never leave partial output files") {
  std::remove("cli_partial.json");
  const auto r =
      run("solve --simulate --penalty 'weibull(k=oops)' --out cli_partial.json");
  CHECK(r.code == 1);
  CHECK_FALSE(exists("cli_partial.json"));
}

TEST_CASE("solve reads matrix and observation files") {
  write_file("cli_A.csv", "1,0,0\n0,1,0\n");
  write_file("cli_y.csv", "0.5\n0\n");
  const auto r = run(
      "solve --matrix cli_A.csv --y cli_y.csv --penalty l1 --lambda 0.1 "
      "--out cli_file_solve.json");
  CHECK(r.code == 0);
  // identity-like A: x1 = soft_threshold(0.5, 0.1) = 0.4
  const std::string text = slurp("cli_file_solve.json");
  const auto xpos = text.find("\"xhat\": [");
  REQUIRE(xpos != std::string::npos);
  const double x1 = std::strtod(text.c_str() + xpos + 9, nullptr);
  CHECK(x1 == doctest::Approx(0.4).epsilon(1e-6));
  std::remove("cli_A.csv");
  std::remove("cli_y.csv");
  std::remove("cli_file_solve.json");
}

TEST_CASE("penalty --curve emits a valid monotone CSV") {
  const auto r = run("penalty --spec 'exp(sigma=1)' --curve --grid-points 51");
  CHECK(r.code == 0);
  const auto lines = body_lines(r.out);
  REQUIRE(lines.size() == 51);
  CHECK(r.out.rfind("t,scaled_penalty", 0) == 0);
  double prev = -1.0;
  for (const auto& line : lines) {
    const auto comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    const double value = std::stod(line.substr(comma + 1));
    CHECK(value >= prev - 1e-12);
    CHECK(value >= 0.0);
    prev = value;
  }
}

TEST_CASE("penalty --weights emits positive decreasing weights for k<1") {
  const auto r = run(
      "penalty --spec 'weibull(k=0.5,sigma=1)' --weights --grid-min 0.1 "
      "--grid-max 2 --grid-points 20");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("t,weight", 0) == 0);
  const auto lines = body_lines(r.out);
  REQUIRE(lines.size() == 20);
  double prev = 1e300;
  for (const auto& line : lines) {
    const double w = std::stod(line.substr(line.find(',') + 1));
    CHECK(w > 0.0);
    CHECK(w <= prev + 1e-12);  // density is decreasing for k < 1
    prev = w;
  }
  CHECK(run("penalty --spec 'exp(sigma=1)' --curve --weights").code == 1);
}

TEST_CASE("measure sweeps theta and marks invalid grid points") {
  const auto r = run(
      "measure --compressible --n 50 --exponent 2 --family exponential "
      "--theta-min 0.5 --theta-max 8 --theta-points 10");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("theta,J", 0) == 0);
  const auto lines = body_lines(r.out);
  REQUIRE(lines.size() == 10);
  // theta = 1/sigma for the exponential: J grows with theta
  const double first = std::stod(lines.front().substr(lines.front().find(',') + 1));
  const double last = std::stod(lines.back().substr(lines.back().find(',') + 1));
  CHECK(last > first);

  const auto inv = run(
      "measure --compressible --family rayleigh --theta-min -1 --theta-max 1 "
      "--theta-points 3");
  CHECK(inv.code == 0);
  CHECK(inv.out.find("invalid") != std::string::npos);

  CHECK(run("measure --compressible --family scad").code == 1);
  CHECK(run("measure --family exponential").code == 1);
}

TEST_CASE("verify --gnsp falsifies the canonical example") {
  write_file("cli_gnsp.csv", "1,1\n");
  const auto r = run(
      "verify --gnsp --matrix cli_gnsp.csv --s 1 --penalty 'exp(sigma=1)' "
      "--seed 5");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"verdict\": \"FALSIFIED\"") != std::string::npos);
  CHECK(r.out.find("\"witness\"") != std::string::npos);
  CHECK(r.out.find("\"certificate\": false") != std::string::npos);
  std::remove("cli_gnsp.csv");
}

TEST_CASE("verify --ssp reports the hand-checked delta") {
  write_file("cli_ssp.csv", "1,1\n");
  const auto r = run("verify --ssp --matrix cli_ssp.csv --q inf --grid 256");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"delta_q\": 2.0") != std::string::npos);
  CHECK(r.out.find("\"upper_bound_only\": false") != std::string::npos);
  std::remove("cli_ssp.csv");
  CHECK(run("verify --ssp --matrix cli_ssp.csv --q inf").code == 1);  // gone
}

TEST_CASE("verify --irwin-hall reports moments near Irwin-Hall") {
  const auto r = run(
      "verify --irwin-hall --penalty 'exp(sigma=1)' --n 12 --samples 20000 "
      "--seed 9");
  CHECK(r.code == 0);
  const auto mpos = r.out.find("\"mean\":");
  REQUIRE(mpos != std::string::npos);
  const double mean = std::strtod(r.out.c_str() + mpos + 7, nullptr);
  CHECK(mean > 5.9);
  CHECK(mean < 6.1);
  CHECK(run("verify").code == 1);  // mode flag is required
}

TEST_CASE("sweep writes the three artifacts deterministically") {
  write_file("cli_sweep_cfg.json", R"cfg({
    "N": 32, "m": 12, "sparsity_grid": [2, 4], "replicates": 3,
    "lambda": 1e-7, "penalties": ["l1", "weibull(k=1,sigma=1)"],
    "master_seed": 7, "admm": {"rho": 1e-5, "max_iter": 200}
  })cfg");
  const auto r1 = run("sweep --config cli_sweep_cfg.json --out cli_sweep_a");
  CHECK(r1.code == 0);
  CHECK(exists("cli_sweep_a/results.csv"));
  CHECK(exists("cli_sweep_a/manifest.json"));
  CHECK(exists("cli_sweep_a/success_rates.csv"));

  const auto r2 = run("sweep --config cli_sweep_cfg.json --out cli_sweep_b");
  CHECK(r2.code == 0);
  // bit-determinism modulo the wall_time column (the last CSV field)
  auto strip_wall = [](const std::string& csv) {
    std::stringstream in(csv), out;
    std::string line;
    while (std::getline(in, line))
      out << line.substr(0, line.rfind(',')) << '\n';
    return out.str();
  };
  CHECK(strip_wall(slurp("cli_sweep_a/results.csv")) ==
        strip_wall(slurp("cli_sweep_b/results.csv")));
  CHECK(slurp("cli_sweep_a/success_rates.csv") ==
        slurp("cli_sweep_b/success_rates.csv"));
  CHECK(slurp("cli_sweep_a/results.csv").rfind(
            "penalty,s,replicate,seed,rel_error,success,outer_iters,wall_time",
            0) == 0);
  std::system("rm -rf cli_sweep_a cli_sweep_b cli_sweep_cfg.json");
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <path-to-cdfpen-binary> [doctest args]\n");
    return 1;
  }
  g_driver = argv[1];
  doctest::Context context;
  context.applyCommandLine(argc - 1, argv + 1);
  return context.run();
}
