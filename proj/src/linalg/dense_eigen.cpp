#include "gep/linalg/dense_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gep/linalg/cholesky.hpp"

namespace gep {

EigenDecomposition jacobi_eigen(std::size_t n, ConstSpan row_major, double rel_tol) {
  require_same_size(row_major.size(), n * n, "jacobi_eigen");
  Vector c(row_major.begin(), row_major.end());
  // Row r of vt is the r-th eigenvector estimate.
  Vector vt(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) vt[i * n + i] = 1.0;

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) s += c[i * n + j] * c[i * n + j];
      }
    }
    return std::sqrt(s);
  };
  const double target = rel_tol * norm2(c);

  constexpr std::size_t kMaxSweeps = 100;
  std::size_t sweeps = 0;
  while (off_norm() > target) {
    if (sweeps == kMaxSweeps) throw NumericalFailure("Jacobi eigensolver did not converge");
    ++sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = c[p * n + q];
        if (apq == 0.0) continue;
        const double app = c[p * n + p];
        const double aqq = c[q * n + q];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * cs;
        double* rp = c.data() + p * n;
        double* rq = c.data() + q * n;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double xp = rp[k];
          const double xq = rq[k];
          const double np = cs * xp - sn * xq;
          const double nq = sn * xp + cs * xq;
          rp[k] = np;
          rq[k] = nq;
          c[k * n + p] = np;
          c[k * n + q] = nq;
        }
        rp[p] = app - t * apq;
        rq[q] = aqq + t * apq;
        rp[q] = 0.0;
        rq[p] = 0.0;
        double* vp = vt.data() + p * n;
        double* vq = vt.data() + q * n;
        for (std::size_t k = 0; k < n; ++k) {
          const double xp = vp[k];
          const double xq = vq[k];
          vp[k] = cs * xp - sn * xq;
          vq[k] = sn * xp + cs * xq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return c[a * n + a] > c[b * n + b]; });
  EigenDecomposition out;
  out.sweeps = sweeps;
  out.values.resize(n);
  out.vectors.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t col = order[r];
    out.values[r] = c[col * n + col];
    out.vectors[r].assign(vt.begin() + static_cast<std::ptrdiff_t>(col * n),
                          vt.begin() + static_cast<std::ptrdiff_t>((col + 1) * n));
  }
  return out;
}

EigenDecomposition generalized_eigen(const SymmetricOperator& a, const SymmetricMatrix& b) {
  const std::size_t n = b.size();
  require_same_size(a.size(), n, "generalized_eigen");
  const CholeskyFactor l = cholesky_factorize(b);

  // C = L^{-1} A L^{-T}, built column by column: column j is L^{-1} A (L^{-T} e_j).
  Vector c(n * n);
  Vector col(n), acol(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    col[j] = 1.0;
    l.solve_upper(col);
    a.apply(col, acol);
    l.solve_lower(acol);
    for (std::size_t i = 0; i < n; ++i) c[i * n + j] = acol[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double s = 0.5 * (c[i * n + j] + c[j * n + i]);
      c[i * n + j] = s;
      c[j * n + i] = s;
    }
  }

  EigenDecomposition eig = jacobi_eigen(n, c);
  for (Vector& w : eig.vectors) l.solve_upper(w);
  return eig;
}

PowerEstimate power_dominant_eigenvalue(std::size_t n,
                                        const std::function<void(ConstSpan, MutSpan)>& apply,
                                        double rel_tol, std::uint64_t seed,
                                        std::size_t max_iterations) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Vector x(n);
  for (double& v : x) v = gauss(rng);
  normalize(x);
  Vector y(n);
  PowerEstimate est;
  double previous = 0.0;
  for (std::size_t k = 1; k <= max_iterations; ++k) {
    apply(x, y);
    const double rq = dot(x, y);
    est.value = rq;
    est.iterations = k;
    const double nrm = norm2(y);
    if (nrm == 0.0) {
      est.converged = true;
      return est;
    }
    if (k > 1 && std::fabs(rq - previous) <= rel_tol * std::fabs(rq)) {
      est.converged = true;
      return est;
    }
    previous = rq;
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / nrm;
  }
  return est;
}

}  // namespace gep
