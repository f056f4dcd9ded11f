#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gep/linalg/cholesky.hpp"
#include "gep/linalg/dense_eigen.hpp"
#include "gep/linalg/linear_solver.hpp"
#include "gep/linalg/matrix_market.hpp"
#include "gep/linalg/symmetric_matrix.hpp"
#include "test_support.hpp"

using namespace gep;
using namespace gep::testing;

namespace {

Eigen::MatrixXd factor_to_eigen(const CholeskyFactor& l) {
  const auto n = static_cast<Eigen::Index>(l.size());
  const Vector d = l.to_dense();
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = d[static_cast<std::size_t>(i * n + j)];
  }
  return m;
}

SymmetricMatrix tridiagonal(std::size_t n) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, 2.5 + 0.1 * static_cast<double>(i)});
    if (i > 0) t.push_back({i, i - 1, -1.0});
  }
  return SymmetricMatrix::from_triplets(n, t);
}

double condition_number(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
}

}  // namespace

TEST(SymmetricMatrix, DenseAndSparseAgree) {
  std::mt19937_64 rng(1);
  const SymmetricMatrix s = random_sparse_spd(30, 0.2, rng);
  const SymmetricMatrix d = SymmetricMatrix::from_full(30, s.to_dense());
  EXPECT_EQ(d.storage(), Storage::dense);
  EXPECT_EQ(s.fingerprint(), d.fingerprint());
  const Vector x = from_eigen(gaussian_vector(30, rng));
  const Vector ys = matvec(s, x);
  const Vector yd = matvec(d, x);
  const Eigen::VectorXd oracle = to_eigen(s) * to_eigen(x);
  EXPECT_LE(relative_error(to_eigen(ys), oracle), 1e-13);
  EXPECT_LE(relative_error(to_eigen(yd), oracle), 1e-13);
}

TEST(SymmetricMatrix, FromFullRejectsAsymmetry) {
  const Vector m{1.0, 2.0, 2.5, 1.0};
  EXPECT_THROW(SymmetricMatrix::from_full(2, m), AsymmetricEntries);
}

TEST(SymmetricMatrix, TripletsMirrorAndSum) {
  const std::vector<Triplet> t{{0, 0, 2.0}, {1, 0, 1.0}, {0, 1, 0.5}, {1, 1, 3.0}};
  const SymmetricMatrix m = SymmetricMatrix::from_triplets(2, t);
  EXPECT_DOUBLE_EQ(m(0, 1), 1.5);
  EXPECT_DOUBLE_EQ(m(1, 0), 1.5);
  EXPECT_EQ(m.nnz(), 4u);
  const std::vector<Triplet> bad{{2, 0, 1.0}};
  EXPECT_THROW(SymmetricMatrix::from_triplets(2, bad), InvalidArgument);
}

TEST(SymmetricMatrix, FingerprintIgnoresRoundoffBelowTwelveDigits) {
  const SymmetricMatrix a = SymmetricMatrix::diagonal(Vector{1.0, 2.0});
  const SymmetricMatrix b = SymmetricMatrix::diagonal(Vector{1.0 + 1e-15, 2.0});
  const SymmetricMatrix c = SymmetricMatrix::diagonal(Vector{1.0 + 1e-6, 2.0});
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  EXPECT_NE(a.fingerprint(), c.fingerprint());
}

TEST(SymmetricMatrix, PlusScaled) {
  const SymmetricMatrix a = SymmetricMatrix::diagonal(Vector{1.0, 2.0});
  const SymmetricMatrix b = SymmetricMatrix::from_full(2, Vector{1.0, 1.0, 1.0, 1.0});
  const SymmetricMatrix c = a.plus_scaled(2.0, b);
  EXPECT_DOUBLE_EQ(c(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(c(1, 0), 2.0);
  EXPECT_DOUBLE_EQ(c(1, 1), 4.0);
}

TEST(Matvec, Examples) {
  const SymmetricMatrix id = SymmetricMatrix::identity(3);
  const Vector x{1.0, -2.0, 3.0};
  EXPECT_EQ(matvec(id, x), x);
  const SymmetricMatrix d = SymmetricMatrix::diagonal(Vector{1.0, 2.0, 3.0});
  EXPECT_EQ(matvec(d, Vector{1.0, 1.0, 1.0}), (Vector{1.0, 2.0, 3.0}));
  EXPECT_THROW(matvec(d, Vector{1.0, 1.0}), DimensionMismatch);
}

TEST(Matvec, CountersTrackCalls) {
  std::mt19937_64 rng(4);
  const SymmetricMatrix s = random_sparse_spd(20, 0.3, rng);
  OpCounters c;
  const Vector x(20, 1.0);
  for (int k = 1; k <= 5; ++k) {
    const OpCounters before = c;
    matvec(s, x, &c);
    EXPECT_EQ(c.matvecs, static_cast<std::uint64_t>(k));
    EXPECT_EQ(c.flops - before.flops, 2 * s.nnz());
  }
  EXPECT_EQ(c.solves, 0u);
}

TEST(Cholesky, TrivialCases) {
  const CholeskyFactor l = cholesky_factorize(SymmetricMatrix::identity(2));
  EXPECT_EQ(l.to_dense(), (Vector{1.0, 0.0, 0.0, 1.0}));
  const CholeskyFactor d = cholesky_factorize(SymmetricMatrix::diagonal(Vector{4.0, 9.0}));
  EXPECT_EQ(d.to_dense(), (Vector{2.0, 0.0, 0.0, 3.0}));
}

TEST(Cholesky, RandomDenseReconstructs) {
  std::mt19937_64 rng(20);
  const Eigen::MatrixXd b = random_spd(20, rng);
  const CholeskyFactor l = cholesky_factorize(dense_from_eigen(b));
  const Eigen::MatrixXd le = factor_to_eigen(l);
  EXPECT_LE((le * le.transpose() - b).norm() / b.norm(), 1e-12);
  for (std::size_t i = 0; i < l.size(); ++i) EXPECT_GT(l.diag(i), 0.0);
  EXPECT_TRUE(le.isLowerTriangular());
}

TEST(Cholesky, SparseProfileMatchesDenseFactor) {
  std::mt19937_64 rng(8);
  const SymmetricMatrix s = random_sparse_spd(40, 0.1, rng);
  const CholeskyFactor l = cholesky_factorize(s);
  const Eigen::MatrixXd oracle = Eigen::LLT<Eigen::MatrixXd>(to_eigen(s)).matrixL();
  EXPECT_LE((factor_to_eigen(l) - oracle).norm() / oracle.norm(), 1e-12);
  EXPECT_EQ(l.source_fingerprint(), s.fingerprint());
  EXPECT_GT(l.setup_flops(), 0u);
}

TEST(Cholesky, RejectsIndefinite) {
  EXPECT_THROW(cholesky_factorize(SymmetricMatrix::diagonal(Vector{1.0, -1.0})),
               NotPositiveDefinite);
  EXPECT_THROW(cholesky_factorize(SymmetricMatrix::diagonal(Vector{1.0, 1e-16})),
               NotPositiveDefinite);
}

TEST(IncompleteCholesky, DiagonalIsExact) {
  const SymmetricMatrix d = SymmetricMatrix::diagonal(Vector{4.0, 9.0, 16.0});
  const CholeskyFactor l = incomplete_cholesky(d);
  EXPECT_EQ(l.to_dense(), cholesky_factorize(d).to_dense());
  EXPECT_TRUE(l.incomplete());
}

TEST(IncompleteCholesky, TridiagonalIsExact) {
  const SymmetricMatrix t = tridiagonal(25);
  const CholeskyFactor l = incomplete_cholesky(t);
  const Eigen::MatrixXd oracle = Eigen::LLT<Eigen::MatrixXd>(to_eigen(t)).matrixL();
  EXPECT_LE((factor_to_eigen(l) - oracle).norm() / oracle.norm(), 1e-13);
  EXPECT_EQ(l.diagonal_shift(), 0.0);
}

TEST(IncompleteCholesky, LaplacianImprovesConditioning) {
  const SymmetricMatrix b = grid_laplacian(16);
  const CholeskyFactor l = incomplete_cholesky(b);
  EXPECT_EQ(l.nnz(), (b.nnz() + b.size()) / 2);
  const Eigen::MatrixXd be = to_eigen(b);
  const Eigen::MatrixXd le = factor_to_eigen(l);
  EXPECT_GT((be - le * le.transpose()).norm(), 0.0);
  const Eigen::MatrixXd li = le.inverse();
  const Eigen::MatrixXd t = li * be * li.transpose();
  EXPECT_LT(condition_number(0.5 * (t + t.transpose())), condition_number(be));
}

TEST(IncompleteCholesky, ShiftRestartOnBreakdown) {
  // SPD 4-cycle whose IC(0) drops enough fill to lose a pivot at gamma = 0
  // and at gamma = 1e-3, but not at gamma = 1e-2.
  const std::vector<Triplet> t{{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}, {3, 3, 1.0},
                               {1, 0, -0.5}, {2, 0, 0.3}, {3, 1, 0.6}, {3, 2, 0.7}};
  const SymmetricMatrix b = SymmetricMatrix::from_triplets(4, t);
  EXPECT_NO_THROW(cholesky_factorize(b));
  const CholeskyFactor l = incomplete_cholesky(b);
  EXPECT_DOUBLE_EQ(l.diagonal_shift(), 1e-2);
  EXPECT_THROW(incomplete_cholesky(SymmetricMatrix::diagonal(Vector{1.0, -5.0})),
               NotPositiveDefinite);
}

TEST(SolveSpd, TrivialCases) {
  const SymmetricMatrix id = SymmetricMatrix::identity(2);
  EXPECT_EQ(solve_spd(LinearSolver::exact(id), id, Vector{3.0, -1.0}), (Vector{3.0, -1.0}));
  const SymmetricMatrix d = SymmetricMatrix::diagonal(Vector{2.0, 4.0});
  for (const LinearSolver& s : {LinearSolver::exact(d), LinearSolver::pcg(d)}) {
    const Vector z = solve_spd(s, d, Vector{2.0, 4.0});
    EXPECT_NEAR(z[0], 1.0, 1e-15);
    EXPECT_NEAR(z[1], 1.0, 1e-15);
  }
}

TEST(SolveSpd, PcgMatchesExact) {
  std::mt19937_64 rng(50);
  const SymmetricMatrix b = dense_from_eigen(random_spd(50, rng));
  const Vector r = from_eigen(gaussian_vector(50, rng));
  const Vector exact = solve_spd(LinearSolver::exact(b), b, r);
  const Vector pcg = solve_spd(LinearSolver::pcg(b, {200, 1e-12, PcgInner::jacobi}), b, r);
  EXPECT_LE(relative_error(to_eigen(pcg), to_eigen(exact)), 1e-8);
}

TEST(SolveSpd, PcgConvergedAgreesForEveryInner) {
  std::mt19937_64 rng(51);
  const SymmetricMatrix b = random_sparse_spd(80, 0.05, rng);
  const Vector r = from_eigen(gaussian_vector(80, rng));
  const Vector exact = solve_spd(LinearSolver::exact(b), b, r);
  for (PcgInner inner : {PcgInner::none, PcgInner::jacobi, PcgInner::ichol}) {
    const Vector z = solve_spd(LinearSolver::pcg(b, {100000, 1e-14, inner}), b, r);
    EXPECT_LE(relative_error(to_eigen(z), to_eigen(exact)), 1e-8);
  }
}

TEST(SolveSpd, ExactResidualOverSeededTrials) {
  std::mt19937_64 rng(200);
  std::uniform_int_distribution<int> size(1, 64);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = size(rng);
    const Eigen::MatrixXd be = random_spd(n, rng, 100.0);
    const SymmetricMatrix b = dense_from_eigen(be);
    const Eigen::VectorXd r = gaussian_vector(n, rng);
    const Vector z = solve_spd(LinearSolver::exact(b), b, from_eigen(r));
    EXPECT_LE((be * to_eigen(z) - r).norm() / r.norm(), 1e-10) << "trial " << trial;
  }
}

TEST(SolveSpd, CountersAndErrors) {
  const SymmetricMatrix b = tridiagonal(10);
  const LinearSolver exact = LinearSolver::exact(b);
  const LinearSolver pcg = LinearSolver::pcg(b, {3, 0.0, PcgInner::jacobi});
  OpCounters c;
  const Vector r(10, 1.0);
  solve_spd(exact, b, r, &c);
  EXPECT_EQ(c.solves, 1u);
  EXPECT_EQ(c.pcg_iterations, 0u);
  solve_spd(pcg, b, r, &c);
  EXPECT_EQ(c.solves, 2u);
  EXPECT_EQ(c.pcg_iterations, 3u);

  EXPECT_THROW(solve_spd(exact, b, Vector(9, 1.0)), DimensionMismatch);
  const SymmetricMatrix other = tridiagonal(10).plus_scaled(1.0, SymmetricMatrix::identity(10));
  EXPECT_THROW(solve_spd(exact, other, r), StaleFactor);
  EXPECT_THROW(solve_spd(pcg, other, r), StaleFactor);
}

TEST(SolveSpd, PcgBreakdownOnIndefinite) {
  const SymmetricMatrix b = SymmetricMatrix::from_full(2, Vector{1.0, 2.0, 2.0, 1.0});
  const LinearSolver pcg = LinearSolver::pcg(b, {10, 1e-12, PcgInner::none});
  EXPECT_THROW(solve_spd(pcg, b, Vector{1.0, -1.0}), PcgBreakdown);
}

TEST(MatrixMarket, SymmetricFixture) {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real symmetric\n"
      "% comment\n"
      "2 2 3\n"
      "1 1 2.0\n"
      "2 1 1.0\n"
      "2 2 3.0\n");
  const SymmetricMatrix m = parse_matrix_market(in);
  EXPECT_EQ(m.storage(), Storage::sparse);
  EXPECT_EQ(m.to_dense(), (Vector{2.0, 1.0, 1.0, 3.0}));
  EXPECT_EQ(m.nnz(), 4u);
}

TEST(MatrixMarket, GeneralFileChecksSymmetry) {
  std::istringstream ok(
      "%%MatrixMarket matrix coordinate real general\n"
      "2 2 4\n1 1 2\n1 2 1\n2 1 1\n2 2 3\n");
  EXPECT_EQ(parse_matrix_market(ok).to_dense(), (Vector{2.0, 1.0, 1.0, 3.0}));
  std::istringstream bad(
      "%%MatrixMarket matrix coordinate real general\n"
      "2 2 4\n1 1 2\n1 2 1\n2 1 1.5\n2 2 3\n");
  EXPECT_THROW(parse_matrix_market(bad), AsymmetricEntries);
}

TEST(MatrixMarket, Errors) {
  std::istringstream empty("");
  EXPECT_THROW(parse_matrix_market(empty), ParseError);
  std::istringstream rect("%%MatrixMarket matrix coordinate real general\n2 3 0\n");
  EXPECT_THROW(parse_matrix_market(rect), NotSquare);
  std::istringstream trunc("%%MatrixMarket matrix coordinate real symmetric\n2 2 3\n1 1 1\n");
  EXPECT_THROW(parse_matrix_market(trunc), ParseError);
  std::istringstream junk("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 x 1\n");
  EXPECT_THROW(parse_matrix_market(junk), ParseError);
  std::istringstream range("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n3 1 1\n");
  EXPECT_THROW(parse_matrix_market(range), ParseError);
  EXPECT_THROW(read_matrix_market("/nonexistent/file.mtx"), IoError);
}

TEST(MatrixMarket, RoundTrip) {
  std::mt19937_64 rng(12);
  const SymmetricMatrix s = random_sparse_spd(40, 0.15, rng);
  std::stringstream buf;
  write_matrix_market(buf, s);
  const SymmetricMatrix back = parse_matrix_market(buf);
  EXPECT_EQ(back.lower_triplets(), s.lower_triplets());
  EXPECT_EQ(back.fingerprint(), s.fingerprint());
}

TEST(MatrixMarket, DenseTextRoundTrip) {
  std::mt19937_64 rng(13);
  const SymmetricMatrix d = dense_from_eigen(random_spd(7, rng));
  const auto path = std::filesystem::temp_directory_path() / "gep_dense_roundtrip.txt";
  write_dense_text(path, d);
  const SymmetricMatrix back = read_matrix(path);
  EXPECT_EQ(back.to_dense(), d.to_dense());
  std::filesystem::remove(path);
}

// Set GEP_LAPLA3_DIR to a directory holding Lapla3_A.mtx and Lapla3_B.mtx.
TEST(MatrixMarket, Lapla3Counts) {
  const char* dir = std::getenv("GEP_LAPLA3_DIR");
  if (dir == nullptr) GTEST_SKIP() << "GEP_LAPLA3_DIR not set";
  const SymmetricMatrix a = read_matrix_market(std::filesystem::path(dir) / "Lapla3_A.mtx");
  const SymmetricMatrix b = read_matrix_market(std::filesystem::path(dir) / "Lapla3_B.mtx");
  EXPECT_EQ(a.size(), 5795u);
  EXPECT_EQ(a.nnz(), 136565u);
  EXPECT_EQ(b.nnz(), 141779u);
}

TEST(DenseEigen, JacobiMatchesEigen) {
  std::mt19937_64 rng(30);
  const Eigen::MatrixXd m = random_symmetric(25, rng);
  const EigenDecomposition ours =
      jacobi_eigen(25, Vector(m.data(), m.data() + m.size()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  for (Eigen::Index i = 0; i < 25; ++i) {
    EXPECT_NEAR(ours.values[static_cast<std::size_t>(i)], es.eigenvalues()(24 - i), 1e-12);
    const Eigen::VectorXd v = to_eigen(ours.vectors[static_cast<std::size_t>(i)]);
    EXPECT_LE((m * v - ours.values[static_cast<std::size_t>(i)] * v).norm(), 1e-10);
  }
}

TEST(DenseEigen, GeneralizedMatchesEigen) {
  std::mt19937_64 rng(31);
  const Eigen::MatrixXd a = random_psd(12, rng);
  const Eigen::MatrixXd b = random_spd(12, rng);
  const EigenDecomposition ours = generalized_eigen(dense_from_eigen(a), dense_from_eigen(b));
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b);
  for (Eigen::Index i = 0; i < 12; ++i) {
    const auto k = static_cast<std::size_t>(i);
    EXPECT_NEAR(ours.values[k], es.eigenvalues()(11 - i), 1e-10);
    const Eigen::VectorXd u = to_eigen(ours.vectors[k]);
    EXPECT_NEAR(u.dot(b * u), 1.0, 1e-10);
  }
}

TEST(DenseEigen, PowerEstimate) {
  const SymmetricMatrix d = SymmetricMatrix::diagonal(Vector{1.0, 2.0, 3.0});
  const PowerEstimate est = power_dominant_eigenvalue(
      3, [&](ConstSpan x, MutSpan y) { d.apply(x, y); }, 1e-10);
  EXPECT_TRUE(est.converged);
  EXPECT_NEAR(est.value, 3.0, 1e-8);
}
