#include "gep/bench/synthetic.hpp"

#include <cmath>
#include <random>
#include <string>

#include "gep/solvers.hpp"

namespace gep {

namespace {

void validate(const SyntheticSpec& spec) {
  if (spec.n < 2) throw InvalidArgument("synthetic n must be >= 2");
  if (!(spec.kappa_a >= 1.0) || !(spec.kappa_b >= 1.0)) {
    throw InvalidArgument("condition numbers must be >= 1");
  }
}

SymmetricMatrix conjugate(const Vector& q, const Vector& d) {
  const std::size_t n = d.size();
  bool constant = true;
  for (double v : d) constant = constant && v == d[0];
  if (constant) return SymmetricMatrix::from_full(n, [&] {
    Vector m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m[i * n + i] = d[0];
    return m;
  }());

  // Packed lower triangle of Q D Q'; qd holds Q scaled by D column-wise.
  Vector qd(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) qd[i * n + k] = q[i * n + k] * d[k];
  }
  Vector packed(n * (n + 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double* qi = qd.data() + i * n;
    for (std::size_t j = 0; j <= i; ++j) {
      const double* qj = q.data() + j * n;
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += qi[k] * qj[k];
      packed[i * (i + 1) / 2 + j] = s;
    }
  }
  return SymmetricMatrix::dense(n, std::move(packed));
}

}  // namespace

Vector even_spectrum(std::size_t n, double kappa) {
  Vector d(n);
  const double lo = 1.0 / kappa;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = n == 1 ? 1.0 : lo + (1.0 - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  d[n - 1] = 1.0;
  return d;
}

Vector random_orthogonal(std::size_t n, std::mt19937_64& rng) {
  // Columns are orthonormalized by modified Gram-Schmidt with one
  // reorthogonalization pass; stored transposed while building.
  std::vector<Vector> cols(n);
  for (std::size_t j = 0; j < n; ++j) cols[j] = gaussian_vector(n, rng);
  for (std::size_t j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) axpy(-dot(cols[i], cols[j]), cols[i], cols[j]);
    }
    normalize(cols[j]);
  }
  Vector q(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) q[i * n + j] = cols[j][i];
  }
  return q;
}

MatrixPair gen_synthetic(const SyntheticSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  const Vector qa = random_orthogonal(spec.n, rng);
  const Vector qb = random_orthogonal(spec.n, rng);
  return MatrixPair(conjugate(qa, even_spectrum(spec.n, spec.kappa_a)),
                    conjugate(qb, even_spectrum(spec.n, spec.kappa_b)));
}

ReferenceSolution reference_solution(const MatrixPair& pair) {
  const std::size_t n = pair.size();
  ReferenceSolution ref;
  if (n <= kReferenceDenseLimit) {
    EigenDecomposition eig = generalized_eigen(pair.a(), pair.b());
    ref.lambda = eig.values[0];
    ref.u = std::move(eig.vectors[0]);
    ref.dense = true;
  } else {
    SolverConfig cfg;
    cfg.method = Method::split_merge;
    cfg.tolerance = 1e-10;
    std::mt19937_64 rng(0x7e57);
    const SolveTrace t = run_split_merge(pair, cfg, gaussian_vector(n, rng));
    if (!t.converged()) throw NumericalFailure("iterative reference did not converge");
    ref.lambda = t.lambda;
    ref.u = t.solution;
    const Vector bu = matvec(pair.b(), ref.u);
    scale(1.0 / std::sqrt(dot(ref.u, bu)), ref.u);
    ref.dense = false;
  }
  const Vector au = matvec(pair.a(), ref.u);
  const Vector bu = matvec(pair.b(), ref.u);
  Vector r = au;
  axpy(-ref.lambda, bu, r);
  ref.residual = norm2(r) / (ref.lambda * norm2(bu));
  if (!(ref.residual <= 1e-8)) {
    throw NumericalFailure("reference residual " + std::to_string(ref.residual) +
                           " exceeds 1e-8");
  }
  return ref;
}

}  // namespace gep
