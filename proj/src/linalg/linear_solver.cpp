#include "gep/linalg/linear_solver.hpp"

#include <cmath>
#include <string>

namespace gep {

LinearSolver LinearSolver::exact(const SymmetricMatrix& b) {
  return exact(std::make_shared<const CholeskyFactor>(cholesky_factorize(b)));
}

LinearSolver LinearSolver::exact(std::shared_ptr<const CholeskyFactor> factor) {
  if (!factor) throw InvalidArgument("exact linear solver needs a factor");
  LinearSolver s;
  s.mode_ = SolveMode::exact;
  s.fingerprint_ = factor->source_fingerprint();
  s.factor_ = std::move(factor);
  return s;
}

LinearSolver LinearSolver::pcg(const SymmetricMatrix& b, PcgOptions options) {
  if (options.max_iterations < 1) throw InvalidArgument("pcg iteration cap must be >= 1");
  if (!(options.tolerance >= 0.0)) throw InvalidArgument("pcg tolerance must be >= 0");
  LinearSolver s;
  s.mode_ = SolveMode::pcg;
  s.options_ = options;
  s.fingerprint_ = b.fingerprint();
  if (options.inner == PcgInner::jacobi) {
    Vector d = b.diagonal();
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (!(d[i] > 0.0)) throw ZeroDiagonal(i);
      d[i] = 1.0 / d[i];
    }
    s.inverse_diagonal_ = std::move(d);
  } else if (options.inner == PcgInner::ichol) {
    s.factor_ = std::make_shared<const CholeskyFactor>(incomplete_cholesky(b));
  }
  return s;
}

std::uint64_t LinearSolver::setup_flops() const {
  return factor_ ? factor_->setup_flops() : 0;
}

Vector LinearSolver::solve(const SymmetricMatrix& b, ConstSpan r, OpCounters* counters) const {
  require_same_size(b.size(), r.size(), "solve_spd");
  if (b.fingerprint() != fingerprint_) throw StaleFactor();
  if (mode_ == SolveMode::pcg) return solve_pcg(b, r, counters);
  require_same_size(factor_->size(), r.size(), "solve_spd");
  Vector z = factor_->solve(r);
  if (counters) {
    ++counters->solves;
    counters->flops += factor_->solve_flops();
  }
  return z;
}

Vector LinearSolver::solve_pcg(const SymmetricMatrix& b, ConstSpan r, OpCounters* counters) const {
  const std::size_t n = r.size();
  std::uint64_t inner_flops = 0;
  auto precondition = [&](ConstSpan res) {
    switch (options_.inner) {
      case PcgInner::jacobi: {
        Vector z(n);
        for (std::size_t i = 0; i < n; ++i) z[i] = inverse_diagonal_[i] * res[i];
        inner_flops += n;
        return z;
      }
      case PcgInner::ichol:
        inner_flops += factor_->solve_flops();
        return factor_->solve(res);
      case PcgInner::none:
        break;
    }
    return Vector(res.begin(), res.end());
  };

  Vector x(n, 0.0);
  Vector res(r.begin(), r.end());
  const double r0 = norm2(res);
  std::size_t iterations = 0;
  std::uint64_t flops = 0;
  if (r0 > 0.0) {
    const double stop = options_.tolerance * r0;
    Vector z = precondition(res);
    Vector p = z;
    Vector bp(n);
    double rz = dot(res, z);
    while (iterations < options_.max_iterations) {
      b.apply(p, bp);
      const double curvature = dot(p, bp);
      if (!(curvature > 0.0)) {
        throw PcgBreakdown("p'Bp = " + std::to_string(curvature) + " at iteration " +
                           std::to_string(iterations));
      }
      const double alpha = rz / curvature;
      axpy(alpha, p, x);
      axpy(-alpha, bp, res);
      ++iterations;
      flops += b.apply_flops() + 10 * n;
      if (norm2(res) <= stop) break;
      z = precondition(res);
      const double rz_next = dot(res, z);
      if (!(rz_next > 0.0)) throw PcgBreakdown("preconditioner lost definiteness");
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
  }
  if (counters) {
    ++counters->solves;
    counters->pcg_iterations += iterations;
    counters->flops += flops + inner_flops;
  }
  return x;
}

Vector solve_spd(const LinearSolver& solver, const SymmetricMatrix& b, ConstSpan r,
                 OpCounters* counters) {
  return solver.solve(b, r, counters);
}

}  // namespace gep
