#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gep/bench/suite.hpp"
#include "gep/bench/synthetic.hpp"
#include "test_support.hpp"

namespace gep {
namespace {

using testing::to_eigen;

MethodSpec spec_of(Method m) {
  MethodSpec s;
  s.method = m;
  return s;
}

SuiteConfig small_suite(std::size_t n, double kappa_b, std::size_t trials) {
  SuiteConfig s;
  s.cells = {{n, kappa_b}};
  s.trials = trials;
  s.methods = {spec_of(Method::power), spec_of(Method::split_merge)};
  s.seed = 11;
  return s;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("gep_bench_" + name);
  std::filesystem::remove_all(p);
  return p;
}

TEST(Synthetic, EvenSpectrumFourValues) {
  const Vector d = even_spectrum(4, 10.0);
  ASSERT_EQ(d.size(), 4u);
  const double want[] = {0.1, 0.4, 0.7, 1.0};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(d[i], want[i], 1e-15);
}

TEST(Synthetic, UnitConditionGivesIdentity) {
  const MatrixPair p = gen_synthetic({6, 1.0, 1.0, 3});
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      EXPECT_EQ((*p.a_matrix())(i, j), i == j ? 1.0 : 0.0);
      EXPECT_EQ(p.b()(i, j), i == j ? 1.0 : 0.0);
    }
  }
}

TEST(Synthetic, ConditionNumbersMatchEigenSolver) {
  const MatrixPair p = gen_synthetic({64, 100.0, 50.0, 7});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(to_eigen(p.b()));
  const double kb = eb.eigenvalues().maxCoeff() / eb.eigenvalues().minCoeff();
  EXPECT_GE(kb, 49.99);
  EXPECT_LE(kb, 50.01);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(to_eigen(*p.a_matrix()));
  EXPECT_NEAR(ea.eigenvalues().maxCoeff() / ea.eigenvalues().minCoeff(), 100.0, 1e-8);
}

TEST(Synthetic, SameSeedSamePair) {
  const MatrixPair p = gen_synthetic({20, 100.0, 10.0, 5});
  const MatrixPair q = gen_synthetic({20, 100.0, 10.0, 5});
  const MatrixPair r = gen_synthetic({20, 100.0, 10.0, 6});
  EXPECT_EQ(to_eigen(*p.a_matrix()), to_eigen(*q.a_matrix()));
  EXPECT_EQ(to_eigen(p.b()), to_eigen(q.b()));
  EXPECT_NE(to_eigen(*p.a_matrix()), to_eigen(*r.a_matrix()));
}

TEST(Synthetic, IdentityBRecoversSpectrumOfA) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const MatrixPair p = gen_synthetic({32, 100.0, 1.0, seed});
    const EigenDecomposition d = generalized_eigen(p.a(), p.b());
    const Vector want = even_spectrum(32, 100.0);
    for (std::size_t i = 0; i < 32; ++i) EXPECT_NEAR(d.values[i], want[31 - i], 1e-8);
  }
}

TEST(Reference, DiagonalIdentity) {
  const MatrixPair p(SymmetricMatrix::diagonal(Vector{4.0, 1.0}), SymmetricMatrix::identity(2));
  const ReferenceSolution r = reference_solution(p);
  EXPECT_NEAR(r.lambda, 4.0, 1e-14);
  EXPECT_NEAR(std::fabs(r.u[0]), 1.0, 1e-14);
  EXPECT_NEAR(r.u[1], 0.0, 1e-14);
}

TEST(Reference, TwoByTwoAnalytic) {
  const MatrixPair p(SymmetricMatrix::diagonal(Vector{2.0, 2.0}), SymmetricMatrix::diagonal(Vector{2.0, 1.0}));
  const ReferenceSolution r = reference_solution(p);
  EXPECT_NEAR(r.lambda, 2.0, 1e-14);
  EXPECT_NEAR(r.u[0], 0.0, 1e-14);
  EXPECT_NEAR(std::fabs(r.u[1]), 1.0, 1e-14);
}

TEST(Reference, RandomPairCertificateAndEigenOracle) {
  std::mt19937_64 rng(16);
  for (int t = 0; t < 10; ++t) {
    const Eigen::MatrixXd a = testing::random_spd(16, rng, 30.0);
    const Eigen::MatrixXd b = testing::random_spd(16, rng, 20.0);
    const MatrixPair p(testing::dense_from_eigen(a), testing::dense_from_eigen(b));
    const ReferenceSolution r = reference_solution(p);
    EXPECT_LE(r.residual, 1e-8);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(a, b);
    EXPECT_NEAR(r.lambda, ges.eigenvalues().maxCoeff(), 1e-10 * r.lambda);
    const Eigen::VectorXd u = testing::to_eigen(r.u);
    EXPECT_NEAR(u.dot(b * u), 1.0, 1e-10);
  }
}

TEST(Summary, Statistics) {
  const Summary s = summarize({4.0, 1.0, 3.0, 2.0});
  EXPECT_EQ(s.count, 4u);
  EXPECT_DOUBLE_EQ(s.median, 2.5);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.stddev, std::sqrt(5.0 / 3.0));
  EXPECT_DOUBLE_EQ(summarize({3.0, 1.0, 2.0}).median, 2.0);
  EXPECT_EQ(summarize({}), Summary{});
}

TEST(Seeds, Splitmix64FirstOutput) { EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL); }

TEST(Seeds, FingerprintSeesEveryBit) {
  Vector v = {1.0, 2.0, 3.0};
  const std::uint64_t h = vector_fingerprint(v);
  v[2] = std::nextafter(3.0, 4.0);
  EXPECT_NE(vector_fingerprint(v), h);
}

TEST(SuiteConfigParse, GridAndMethodObjects) {
  std::istringstream in(R"({
    "n": [64, 128], "kappa_b": [3, 100], "trials": 5, "seed": 9,
    "methods": ["power", {"method": "split-merge", "linsolve": "pcg", "pcg_cap": 30, "label": "sm-pcg"},
                {"method": "pmd", "precond": "diag"}],
    "out_dir": "out"
  })");
  const SuiteConfig s = parse_suite(in);
  ASSERT_EQ(s.cells.size(), 4u);
  EXPECT_EQ(s.cells[1], (SuiteCell{64, 100.0}));
  EXPECT_EQ(s.cells[2], (SuiteCell{128, 3.0}));
  EXPECT_EQ(s.trials, 5u);
  EXPECT_EQ(s.seed, 9u);
  ASSERT_EQ(s.methods.size(), 3u);
  EXPECT_EQ(s.methods[1].linsolve, SolveMode::pcg);
  EXPECT_EQ(s.methods[1].name(), "sm-pcg");
  EXPECT_EQ(s.methods[2].precond, PreconditionerKind::diagonal);
  EXPECT_EQ(s.methods[2].name(), "pmd");
  EXPECT_EQ(s.out_dir, "out");
}

TEST(SuiteConfigParse, Rejections) {
  const auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_suite(in);
  };
  EXPECT_THROW(parse("{"), ParseError);
  EXPECT_THROW(parse(R"({"cells": [{"n": 8, "kappa_b": 3}], "trails": 3})"), ParseError);
  EXPECT_THROW(parse(R"({"cells": [{"n": 8, "kappa_b": 3}], "trials": 0})"), ParseError);
  EXPECT_THROW(parse(R"({"cells": []})"), ParseError);
  EXPECT_THROW(parse(R"({"cells": [{"n": 8, "kappa_b": 3}], "methods": ["newton"]})"), InvalidArgument);
  EXPECT_THROW(parse(R"({"cells": [{"n": 8, "kappa_b": 3}], "methods": ["power", "power"]})"), ParseError);
  EXPECT_THROW(load_suite("/nonexistent/suite.json"), IoError);
}

TEST(SuiteConfigParse, DefaultGrids) {
  const SuiteConfig ci = SuiteConfig::ci_grid();
  EXPECT_EQ(ci.cells.size(), 20u);
  EXPECT_EQ(ci.trials, 20u);
  const SuiteConfig full = SuiteConfig::full_grid();
  EXPECT_EQ(full.cells.size(), 30u);
  EXPECT_EQ(full.trials, 100u);
  EXPECT_EQ(full.kappa_a, 100.0);
}

TEST(RunSuite, SingleTrialSharesStartVector) {
  const BenchmarkReport r = run_suite(small_suite(16, 10.0, 1));
  ASSERT_EQ(r.cells.size(), 1u);
  ASSERT_EQ(r.cells[0].methods.size(), 2u);
  EXPECT_EQ(r.cells[0].methods[0].method, "power");
  EXPECT_EQ(r.cells[0].methods[1].method, "split-merge");
  ASSERT_EQ(r.runs.size(), 2u);
  EXPECT_EQ(r.runs[0].x0_fingerprint, r.runs[1].x0_fingerprint);
  EXPECT_NE(r.runs[0].x0_fingerprint, 0u);
}

TEST(RunSuite, SplitMergeMedianBelowPower) {
  const BenchmarkReport r = run_suite(small_suite(64, 100.0, 20));
  const CellReport& c = r.cells[0];
  EXPECT_EQ(c.methods[0].success_rate, 1.0);
  EXPECT_EQ(c.methods[1].success_rate, 1.0);
  EXPECT_LT(c.methods[1].iterations.median, c.methods[0].iterations.median);
  EXPECT_EQ(c.speedups.size(), 20u);
  EXPECT_GT(c.speedup.median, 1.0);
}

TEST(RunSuite, GdCostsMoreThanPowerAtHighKappaB) {
  SuiteConfig s = small_suite(64, 100.0, 5);
  s.methods = {spec_of(Method::gd), spec_of(Method::power)};
  const BenchmarkReport r = run_suite(s);
  const CellReport& c = r.cells[0];
  ASSERT_EQ(c.methods[0].successes, 5u);
  EXPECT_GT(c.methods[0].flops.median, c.methods[1].flops.median);
}

TEST(RunSuite, FailuresAreRecordedNotThrown) {
  SuiteConfig s = small_suite(32, 100.0, 3);
  s.max_iterations = 2;
  s.tolerance = 1e-12;
  const BenchmarkReport r = run_suite(s);
  for (const RunRecord& run : r.runs) EXPECT_EQ(run.status, "max-iterations");
  for (const MethodStats& m : r.cells[0].methods) {
    EXPECT_EQ(m.trials, 3u);
    EXPECT_EQ(m.successes, 0u);
    EXPECT_EQ(m.success_rate, 0.0);
    EXPECT_EQ(m.iterations.count, 0u);
  }
  EXPECT_TRUE(r.cells[0].speedups.empty());
}

TEST(RunSuite, DeterministicAcrossThreadCounts) {
  SuiteConfig s = small_suite(24, 10.0, 6);
  s.methods.push_back(spec_of(Method::gd));
  s.keep_traces = true;
  const BenchmarkReport a = run_suite(s);
  s.threads = 4;
  const BenchmarkReport b = run_suite(s);
  ASSERT_EQ(a.runs.size(), b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    RunRecord ra = a.runs[i], rb = b.runs[i];
    ra.wall_seconds = rb.wall_seconds = 0.0;
    EXPECT_EQ(ra, rb);
    EXPECT_FALSE(ra.trace_csv.empty());
  }
}

TEST(Export, EmptyReportIsHeaderOnly) {
  std::ostringstream out;
  write_report_csv(BenchmarkReport{}, out);
  EXPECT_EQ(out.str(), std::string(kReportCsvHeader) + "\n");
}

TEST(Export, RowCountIsMethodsTimesStatistics) {
  const BenchmarkReport r = run_suite(small_suite(12, 10.0, 2));
  std::ostringstream out;
  write_report_csv(r, out);
  std::istringstream in(out.str());
  std::string line;
  std::size_t rows = 0;
  std::getline(in, line);
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2 * report_statistics().size());
}

TEST(Export, JsonRoundTrip) {
  SuiteConfig s = small_suite(12, 10.0, 3);
  s.keep_traces = true;
  const BenchmarkReport r = run_suite(s);
  std::stringstream io;
  write_report_json(r, io);
  EXPECT_EQ(parse_report_json(io), r);
}

TEST(Export, WritesFilesAndTraces) {
  SuiteConfig s = small_suite(12, 10.0, 2);
  s.keep_traces = true;
  const BenchmarkReport r = run_suite(s);
  const auto dir = temp_dir("export");
  export_report(r, dir);
  EXPECT_TRUE(std::filesystem::exists(dir / "report.csv"));
  EXPECT_EQ(read_report_json(dir / "report.json"), r);
  EXPECT_TRUE(std::filesystem::exists(dir / "traces" / "cell0_trial1_split-merge.csv"));
  std::filesystem::remove_all(dir);
}

TEST(Export, UnwritableDirectory) {
  const auto file = temp_dir("blocker");
  std::ofstream(file) << "x";
  EXPECT_THROW(export_report(BenchmarkReport{}, file / "sub"), IoError);
  std::filesystem::remove(file);
}

TEST(Export, RejectsUnknownSchema) {
  std::istringstream in(R"({"schema_version": 99, "cells": [], "runs": []})");
  EXPECT_THROW(parse_report_json(in), ParseError);
}

}  // namespace
}  // namespace gep
