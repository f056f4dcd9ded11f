#include <algorithm>
#include <cmath>
#include <string>

#include "gep/linalg/dense_eigen.hpp"
#include "run_context.hpp"

namespace gep {

namespace {

constexpr double kBreakdown = 1e-12;

// Largest eigenpair of the symmetric tridiagonal matrix (alpha, beta).
std::pair<double, Vector> top_ritz_pair(const Vector& alpha, const Vector& beta) {
  const std::size_t m = alpha.size();
  Vector t(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    t[i * m + i] = alpha[i];
    if (i + 1 < m) {
      t[i * m + i + 1] = beta[i];
      t[(i + 1) * m + i] = beta[i];
    }
  }
  EigenDecomposition eig = jacobi_eigen(m, t, 1e-14);
  return {eig.values[0], std::move(eig.vectors[0])};
}

Vector combine(const std::vector<Vector>& basis, const Vector& coeff) {
  Vector out(basis[0].size(), 0.0);
  for (std::size_t j = 0; j < coeff.size(); ++j) axpy(coeff[j], basis[j], out);
  return out;
}

double orthogonality_drift(const MatrixPair& pair, const std::vector<Vector>& v) {
  double worst = 0.0;
  Vector bv(pair.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    pair.b().apply(v[j], bv);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double g = dot(v[i], bv) - (i == j ? 1.0 : 0.0);
      worst = std::max(worst, std::fabs(g));
    }
  }
  return worst;
}

}  // namespace

SolveTrace run_lanczos(const MatrixPair& pair, const SolverConfig& config, ConstSpan x0) {
  detail::RunContext ctx(pair, config, Method::lanczos, x0);
  const LanczosOptions& opt = config.lanczos;
  if (opt.cycle_length < 2) throw InvalidArgument("Lanczos cycle length must be >= 2");
  const LinearSolver& solver = ctx.linear_solver();
  const std::size_t n = pair.size();
  const std::size_t m = std::min(opt.cycle_length, n);

  Vector x(x0.begin(), x0.end());
  Vector ax = matvec(pair.a(), x, ctx.counters());
  Vector bx = matvec(pair.b(), x, ctx.counters());
  if (is_degenerate(dot(x, ax), x)) throw DegenerateDirection();
  if (ctx.record(0, x, ax, {}, false)) return ctx.finish(Status::converged, x);
  if (ctx.at_cap(0)) return ctx.finish(Status::max_iterations, x);

  std::size_t k = 0;
  for (;;) {
    // B-normalized start vector for this cycle.
    const double bnorm = std::sqrt(dot(x, bx));
    std::vector<Vector> v{scaled(1.0 / bnorm, x)};
    std::vector<Vector> bv{scaled(1.0 / bnorm, bx)};
    std::vector<Vector> av{scaled(1.0 / bnorm, ax)};
    Vector alpha, beta;

    Vector ritz;
    for (std::size_t j = 0; j < m; ++j) {
      if (j > 0) av.push_back(matvec(pair.a(), v[j], ctx.counters()));
      Vector w = solve_spd(solver, pair.b(), av[j], ctx.counters());
      Vector bw = av[j];
      const double a = dot(v[j], av[j]);
      alpha.push_back(a);
      axpy(-a, v[j], w);
      axpy(-a, bv[j], bw);
      if (j > 0) {
        axpy(-beta[j - 1], v[j - 1], w);
        axpy(-beta[j - 1], bv[j - 1], bw);
      }
      if (opt.reorthogonalize) {
        for (int pass = 0; pass < 2; ++pass) {
          for (std::size_t i = 0; i <= j; ++i) {
            const double h = dot(bv[i], w);
            axpy(-h, v[i], w);
            axpy(-h, bv[i], bw);
          }
        }
      }
      ++k;

      const auto [theta, s] = top_ritz_pair(alpha, beta);
      ritz = combine(v, s);
      const Vector aritz = combine(av, s);
      if (ctx.record(k, ritz, aritz, {}, false)) return ctx.finish(Status::converged, ritz);
      if (ctx.at_cap(k)) return ctx.finish(Status::max_iterations, ritz);

      if (j + 1 == m) break;
      const double b = std::sqrt(std::max(dot(w, bw), 0.0));
      double scale_ref = 0.0;
      for (double t : alpha) scale_ref = std::max(scale_ref, std::fabs(t));
      if (b <= kBreakdown * scale_ref) {
        throw Breakdown("invariant Krylov subspace after " + std::to_string(k) +
                        " steps with an unconverged Ritz pair (theta = " + std::to_string(theta) +
                        ")");
      }
      beta.push_back(b);
      v.push_back(scaled(1.0 / b, w));
      bv.push_back(scaled(1.0 / b, bw));
    }

    if (opt.track_orthogonality) ctx.trace().orthogonality_drift.push_back(orthogonality_drift(pair, v));
    const Vector s = top_ritz_pair(alpha, beta).second;
    x = combine(v, s);
    ax = combine(av, s);
    bx = combine(bv, s);
  }
}

}  // namespace gep
