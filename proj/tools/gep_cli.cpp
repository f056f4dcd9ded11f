// gep: generate, solve and benchmark symmetric-definite generalized
// eigenproblems.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gep/bench/suite.hpp"
#include "gep/bench/synthetic.hpp"
#include "gep/deflation.hpp"
#include "gep/linalg/matrix_market.hpp"
#include "gep/solvers.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCap = 2;
constexpr int kExitInput = 3;
constexpr int kExitNumerical = 4;

struct GenOptions {
  std::size_t n = 64;
  double kappa_a = 100.0;
  double kappa_b = 10.0;
  std::uint64_t seed = 0;
  std::string out;
};

struct SolveOptions {
  std::string a, b;
  std::string method = "split-merge";
  std::string precond = "cholesky";
  std::string linsolve = "cholesky";
  std::size_t pcg_cap = 30;
  double rho = 1.0;
  double tol = 1e-5;
  std::size_t max_iters = 100000;
  std::uint64_t seed = 0;
  std::optional<double> alpha;
  std::string trace;
  std::string solution;
  std::string ref = "internal";
};

struct TopkOptions {
  SolveOptions solve;
  std::size_t k = 1;
};

struct BenchOptions {
  std::string suite;
  std::string out_dir;
  std::size_t threads = 0;
};

int exit_code(gep::Status s) {
  switch (s) {
    case gep::Status::converged:
      return kExitOk;
    case gep::Status::max_iterations:
      return kExitCap;
    case gep::Status::degenerate:
      return kExitNumerical;
  }
  return kExitNumerical;
}

void add_solve_flags(CLI::App* cmd, SolveOptions& o) {
  cmd->add_option("--a", o.a, "A matrix (MatrixMarket or dense text)")->required();
  cmd->add_option("--b", o.b, "B matrix (MatrixMarket or dense text)")->required();
  cmd->add_option("--method", o.method)
      ->check(CLI::IsMember({"gd", "pmd", "power", "split-merge", "lanczos"}))
      ->capture_default_str();
  cmd->add_option("--precond", o.precond, "PMD preconditioner")
      ->check(CLI::IsMember({"identity", "diag", "cholesky", "ichol"}))
      ->capture_default_str();
  cmd->add_option("--linsolve", o.linsolve, "solves with B")
      ->check(CLI::IsMember({"cholesky", "pcg"}))
      ->capture_default_str();
  cmd->add_option("--pcg-cap", o.pcg_cap, "PCG iteration cap")->capture_default_str();
  cmd->add_option("--rho", o.rho, "Split-Merge rho >= 1")->capture_default_str();
  cmd->add_option("--tol", o.tol)->capture_default_str();
  cmd->add_option("--max-iters", o.max_iters)->capture_default_str();
  cmd->add_option("--seed", o.seed)->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "fixed GD/PMD stepsize instead of the sampled one");
  cmd->add_option("--trace", o.trace, "write the per-iteration trace as CSV");
  cmd->add_option("--solution", o.solution, "write the final vector, one entry per line");
  cmd->add_option("--ref", o.ref, "stop on sin(theta) against an internal reference, or on the residual")
      ->check(CLI::IsMember({"internal", "none"}))
      ->capture_default_str();
}

gep::SolverConfig make_config(const SolveOptions& o, const gep::MatrixPair& pair) {
  gep::SolverConfig cfg;
  cfg.method = gep::parse_method(o.method);
  cfg.rho = o.rho;
  cfg.tolerance = o.tol;
  cfg.max_iterations = o.max_iters;
  cfg.seed = o.seed;
  if (o.alpha) cfg.stepsize = gep::Stepsize::fixed(*o.alpha);
  if (o.linsolve == "pcg") {
    gep::PcgOptions pcg;
    pcg.max_iterations = o.pcg_cap;
    cfg.linear_solver = std::make_shared<const gep::LinearSolver>(gep::LinearSolver::pcg(pair.b(), pcg));
  }
  if (cfg.method == gep::Method::pmd) {
    cfg.preconditioner = std::make_shared<const gep::Preconditioner>(
        gep::build_preconditioner(pair.b(), gep::parse_preconditioner_kind(o.precond)));
  }
  return cfg;
}

gep::MatrixPair load_pair(const SolveOptions& o) {
  return gep::MatrixPair(gep::read_matrix(o.a), gep::read_matrix(o.b));
}

gep::Vector start_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return gep::gaussian_vector(n, rng);
}

void write_vector(const std::string& path, gep::ConstSpan v) {
  std::ofstream out(path);
  if (!out) throw gep::IoError("cannot write " + path);
  char buf[32];
  for (double x : v) {
    std::snprintf(buf, sizeof buf, "%.17g\n", x);
    out << buf;
  }
}

int run_gen(const GenOptions& o) {
  const gep::MatrixPair pair = gep::gen_synthetic({o.n, o.kappa_a, o.kappa_b, o.seed});
  const std::string a_path = o.out + "_A.mtx";
  const std::string b_path = o.out + "_B.mtx";
  gep::write_matrix_market(a_path, *pair.a_matrix());
  gep::write_matrix_market(b_path, pair.b());
  std::cout << "wrote " << a_path << " and " << b_path << '\n';
  return kExitOk;
}

int run_solve(const SolveOptions& o) {
  const gep::MatrixPair pair = load_pair(o);
  gep::SolverConfig cfg = make_config(o, pair);
  if (o.ref == "internal") cfg.reference = gep::reference_solution(pair).u;
  const gep::SolveTrace t = gep::run_solver(pair, cfg, start_vector(pair.size(), o.seed));
  if (!o.trace.empty()) {
    std::ofstream out(o.trace);
    if (!out) throw gep::IoError("cannot write " + o.trace);
    t.write_csv(out);
  }
  if (!o.solution.empty()) write_vector(o.solution, t.solution);
  std::printf("method=%s status=%s iterations=%zu lambda=%.17g matvecs=%llu solves=%llu flops=%llu\n",
              std::string(gep::to_string(t.method)).c_str(), std::string(gep::to_string(t.status)).c_str(),
              t.iterations, t.lambda, static_cast<unsigned long long>(t.counters.matvecs),
              static_cast<unsigned long long>(t.counters.solves),
              static_cast<unsigned long long>(t.counters.flops));
  return exit_code(t.status);
}

void print_pairs(const std::vector<gep::EigenPair>& pairs) {
  std::printf("index,lambda,residual,iterations\n");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::printf("%zu,%.17g,%.3e,%zu\n", i, pairs[i].lambda, pairs[i].residual, pairs[i].iterations);
  }
}

int run_topk(const TopkOptions& o) {
  const gep::MatrixPair pair = load_pair(o.solve);
  const gep::SolverConfig cfg = make_config(o.solve, pair);
  try {
    print_pairs(gep::top_k(pair, o.k, cfg));
    return kExitOk;
  } catch (const gep::StageFailure& e) {
    print_pairs(e.partial());
    std::fprintf(stderr, "gep: %s\n", e.what());
    return exit_code(e.status());
  }
}

int run_bench(const BenchOptions& o) {
  gep::SuiteConfig suite = gep::load_suite(o.suite);
  if (!o.out_dir.empty()) suite.out_dir = o.out_dir;
  if (o.threads > 0) suite.threads = o.threads;
  const gep::BenchmarkReport report = gep::run_suite(suite);
  gep::export_report(report, suite.out_dir);
  std::printf("%6s %8s %-14s %8s %10s %10s\n", "n", "kappa_b", "method", "success", "median_it",
              "mean_it");
  for (const gep::CellReport& c : report.cells) {
    for (const gep::MethodStats& m : c.methods) {
      std::printf("%6zu %8g %-14s %8.2f %10g %10.1f\n", c.n, c.kappa_b, m.method.c_str(), m.success_rate,
                  m.iterations.median, m.iterations.mean);
    }
    if (c.speedup.count > 0) std::printf("%6s %8s speedup median %.2f%%\n", "", "", 100.0 * c.speedup.median);
  }
  std::cout << "report written to " << suite.out_dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized symmetric-definite eigensolvers"};
  app.require_subcommand(1);

  GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "write a synthetic pair as PATH_A.mtx and PATH_B.mtx");
  gen_cmd->add_option("--n", gen.n)->capture_default_str();
  gen_cmd->add_option("--kappa-a", gen.kappa_a)->capture_default_str();
  gen_cmd->add_option("--kappa-b", gen.kappa_b)->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "output path prefix")->required();

  SolveOptions solve;
  CLI::App* solve_cmd = app.add_subcommand("solve", "compute the top generalized eigenpair");
  add_solve_flags(solve_cmd, solve);

  TopkOptions topk;
  CLI::App* topk_cmd = app.add_subcommand("topk", "compute the top k pairs by deflation");
  add_solve_flags(topk_cmd, topk.solve);
  topk_cmd->add_option("--k", topk.k)->required();

  BenchOptions bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "run a benchmark suite");
  bench_cmd->add_option("--suite", bench.suite, "suite JSON")->required();
  bench_cmd->add_option("--out-dir", bench.out_dir, "overrides out_dir from the suite");
  bench_cmd->add_option("--threads", bench.threads, "overrides threads from the suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*solve_cmd) return run_solve(solve);
    if (*topk_cmd) return run_topk(topk);
    if (*bench_cmd) return run_bench(bench);
  } catch (const gep::Error& e) {
    std::fprintf(stderr, "gep: %s\n", e.what());
    return e.error_class() == gep::ErrorClass::input ? kExitInput : kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "gep: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitInput;
}
