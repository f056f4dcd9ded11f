#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gep/bench/synthetic.hpp"
#include "gep/solvers.hpp"

namespace gep {

struct SuiteCell {
  std::size_t n = 64;
  double kappa_b = 10.0;

  friend bool operator==(const SuiteCell&, const SuiteCell&) = default;
};

// One method column of the suite. label defaults to the method name.
struct MethodSpec {
  Method method = Method::split_merge;
  SolveMode linsolve = SolveMode::exact;
  std::size_t pcg_cap = 30;
  PreconditionerKind precond = PreconditionerKind::cholesky;  // pmd only
  std::string label;

  std::string name() const;
};

struct SuiteConfig {
  std::vector<SuiteCell> cells;
  double kappa_a = 100.0;
  std::size_t trials = 100;
  std::vector<MethodSpec> methods;
  double tolerance = 1e-5;
  std::size_t max_iterations = 100000;
  std::uint64_t seed = 0;
  // Worker threads per cell; results do not depend on it.
  std::size_t threads = 1;
  // Keep every trace (timing excluded) in the report.
  bool keep_traces = false;
  std::filesystem::path out_dir = "bench_out";

  // kappa_B in {3,5,8,10,13,30,40,50,80,100} x n in {256,512,1024}.
  static SuiteConfig full_grid();
  // The same kappa_B values with n in {64,128} and 20 trials.
  static SuiteConfig ci_grid();
};

SuiteConfig parse_suite(std::istream& in);
SuiteConfig load_suite(const std::filesystem::path& path);

std::uint64_t splitmix64(std::uint64_t x);
// FNV-1a over the bytes of v.
std::uint64_t vector_fingerprint(ConstSpan v);

struct RunRecord {
  std::size_t cell = 0;
  std::size_t trial = 0;
  std::string method;
  // converged, max-iterations, degenerate or error.
  std::string status;
  std::string error;
  std::size_t iterations = 0;
  std::uint64_t matvecs = 0;
  std::uint64_t solves = 0;
  std::uint64_t flops = 0;
  double lambda = 0.0;
  double wall_seconds = 0.0;
  std::uint64_t x0_fingerprint = 0;
  // CSV trace without timing; empty unless keep_traces.
  std::string trace_csv;

  bool converged() const { return status == "converged"; }
  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct Summary {
  std::size_t count = 0;
  double median = 0.0;
  double mean = 0.0;
  double stddev = 0.0;

  friend bool operator==(const Summary&, const Summary&) = default;
};

// Sample statistics; all zero for an empty sample.
Summary summarize(std::vector<double> values);

// Statistics cover successful runs only.
struct MethodStats {
  std::string method;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  Summary iterations;
  Summary matvecs;
  Summary solves;
  Summary flops;
  Summary wall_seconds;

  friend bool operator==(const MethodStats&, const MethodStats&) = default;
};

struct CellReport {
  std::size_t n = 0;
  double kappa_a = 0.0;
  double kappa_b = 0.0;
  std::uint64_t pair_seed = 0;
  double lambda1 = 0.0;
  std::vector<MethodStats> methods;
  // Power iterations / Split-Merge iterations over trials where both
  // converged. Empty when either method is absent.
  std::vector<double> speedups;
  Summary speedup;

  friend bool operator==(const CellReport&, const CellReport&) = default;
};

inline constexpr int kReportSchemaVersion = 1;

struct BenchmarkReport {
  int schema_version = kReportSchemaVersion;
  std::vector<CellReport> cells;
  std::vector<RunRecord> runs;

  friend bool operator==(const BenchmarkReport&, const BenchmarkReport&) = default;
};

// Per cell: one pair from splitmix64(seed ^ cell index), one reference
// solution, then every method from the same x0 per trial. Failed runs are
// recorded, never thrown.
BenchmarkReport run_suite(const SuiteConfig& suite);

inline constexpr std::string_view kReportCsvHeader = "n,kappa_a,kappa_b,method,statistic,value";
// Statistic names emitted per cell x method, in order.
const std::vector<std::string>& report_statistics();

void write_report_csv(const BenchmarkReport& report, std::ostream& out);
void write_report_json(const BenchmarkReport& report, std::ostream& out);
BenchmarkReport parse_report_json(std::istream& in);
BenchmarkReport read_report_json(const std::filesystem::path& path);

// Writes report.csv, report.json and, when traces were kept,
// traces/cell<i>_trial<j>_<method>.csv under dir. Throws IoError.
void export_report(const BenchmarkReport& report, const std::filesystem::path& dir);

}  // namespace gep
