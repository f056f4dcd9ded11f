#include <cmath>
#include <random>
#include <string>

#include "run_context.hpp"

namespace gep {

namespace {

// alpha * L must lie in (0, 2).
double choose_stepsize(const Stepsize& s, double L, std::uint64_t seed) {
  if (s.policy == Stepsize::Policy::fixed) {
    if (!(s.value > 0.0) || !(s.value * L < 2.0)) {
      throw InvalidStepsize("alpha = " + std::to_string(s.value) + " with bound " +
                            std::to_string(2.0 / L));
    }
    return s.value;
  }
  if (!(s.lo > 0.0) || !(s.lo <= s.hi) || !(s.hi < 1.0)) {
    throw InvalidStepsize("sampling interval [" + std::to_string(s.lo) + ", " +
                          std::to_string(s.hi) + "] must lie inside (0, 1)");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(s.lo, s.hi);
  return u(rng) * 2.0 / L;
}

// Shared loop for x_{k+1} = x_k - alpha M^{-1} grad f(x_k), where M = P'P
// (or I when precond is null).
SolveTrace descend(const MatrixPair& pair, const SolverConfig& config, ConstSpan x0, Method method,
                   double L, const Preconditioner* precond) {
  detail::RunContext ctx(pair, config, method, x0);
  const double alpha = choose_stepsize(config.stepsize, L, config.seed);
  ctx.trace().stepsize = alpha;

  Vector x(x0.begin(), x0.end());
  for (std::size_t k = 0;; ++k) {
    const PointEval p = evaluate_point(pair, x, ctx.counters());
    if (is_degenerate(p.xax, x)) {
      if (k == 0) throw DegenerateDirection();
      return ctx.finish(Status::degenerate, x);
    }
    if (ctx.record(k, x, p.ax, p.bx, true)) return ctx.finish(Status::converged, x);
    if (ctx.at_cap(k)) return ctx.finish(Status::max_iterations, x);
    const Vector g = gradient_from(p, x);
    if (precond != nullptr) {
      axpy(-alpha, apply_gram_inverse(*precond, g, ctx.counters()), x);
    } else {
      axpy(-alpha, g, x);
    }
  }
}

}  // namespace

SolveTrace run_gd(const MatrixPair& pair, const SolverConfig& config, ConstSpan x0) {
  require_same_size(x0.size(), pair.size(), "initial vector");
  const CurvatureBound bound = estimate_L_plus(pair.b(), config.curvature);
  return descend(pair, config, x0, Method::gd, bound.L_plus, nullptr);
}

SolveTrace run_pmd(const MatrixPair& pair, const SolverConfig& config, ConstSpan x0) {
  require_same_size(x0.size(), pair.size(), "initial vector");
  std::shared_ptr<const Preconditioner> precond = config.preconditioner;
  if (!precond) {
    precond = std::make_shared<const Preconditioner>(
        build_preconditioner(pair.b(), PreconditionerKind::cholesky));
  }
  require_same_size(precond->size(), pair.size(), "preconditioner");
  if (precond->source_fingerprint() != pair.b().fingerprint()) throw StaleFactor();

  // Curvature bound of the transformed problem, 2 lambda_1(B~).
  double L = 0.0;
  switch (precond->kind()) {
    case PreconditionerKind::cholesky:
      L = 2.0;
      break;
    case PreconditionerKind::identity:
      L = estimate_L_plus(pair.b(), config.curvature).L_plus;
      break;
    default:
      L = 2.0 * 1.01 * transformed_dominant_eigenvalue(pair.b(), *precond);
      break;
  }
  return descend(pair, config, x0, Method::pmd, L, precond.get());
}

}  // namespace gep
