#include <cmath>
#include <string>

#include "run_context.hpp"

namespace gep {

namespace {

constexpr double kDeltaFloor = 1e-14;

// Step from x with Ax already formed.
Vector step_from(const MatrixPair& pair, SplitMergeState& st, ConstSpan x, Vector ax, double rho,
                 const LinearSolver& solver, OpCounters* counters) {
  const double xax = dot(x, ax);
  if (is_degenerate(xax, x)) throw DegenerateDirection();
  const std::size_t n = x.size();
  const double root = std::sqrt(xax);

  Vector p = solve_spd(solver, pair.b(), ax, counters);
  const double c1 = dot(ax, p);
  const double c = c1 / xax;
  Vector q = matvec(pair.a(), p, counters);
  Vector z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = q[i] - c * ax[i];
  // delta = d'Ad with d = p - c x and Ad = z.
  double delta = 0.0;
  for (std::size_t i = 0; i < n; ++i) delta += (p[i] - c * x[i]) * z[i];

  st.xax = xax;
  st.xabax = c1;
  st.delta = delta;
  st.xababax = delta + c * c1;
  st.escalations = 0;
  st.rho = rho;

  Vector next(n);
  if (delta <= kDeltaFloor * c1 * c1 / xax) {
    // x is numerically an eigenvector direction: take the power step.
    st.power_fallback = true;
    st.sigma = 1.0;
    st.omega = 0.0;
    st.zeta = 1.0 / (2.0 * root);
    for (std::size_t i = 0; i < n; ++i) next[i] = st.zeta * p[i];
  } else {
    st.power_fallback = false;
    const Vector s = solve_spd(solver, pair.b(), q, counters);
    Vector w(n);  // B^{-1} z
    for (std::size_t i = 0; i < n; ++i) w[i] = s[i] - c * p[i];
    const double zbz = dot(z, w);
    double sigma = 1.0 - zbz / (2.0 * rho * root * delta);
    while (!(sigma > 0.0)) {
      if (st.escalations == kMaxRhoDoublings) {
        throw NumericalFailure("sigma stayed non-positive after " +
                               std::to_string(kMaxRhoDoublings) + " doublings of rho");
      }
      rho *= 2.0;
      ++st.escalations;
      sigma = 1.0 - zbz / (2.0 * rho * root * delta);
    }
    st.rho = rho;
    st.sigma = sigma;
    st.omega = 1.0 / (4.0 * sigma * rho * xax);
    st.zeta = 1.0 / (2.0 * root) - st.omega * c;
    // zeta p + omega s, regrouped as p / (2 sqrt(x'Ax)) + omega (s - c p).
    const double half_inv_root = 1.0 / (2.0 * root);
    for (std::size_t i = 0; i < n; ++i) next[i] = half_inv_root * p[i] + st.omega * w[i];
  }
  st.ax = std::move(ax);
  st.binv_ax = std::move(p);
  st.ab_ax = std::move(q);
  st.z = std::move(z);
  return next;
}

}  // namespace

Vector split_merge_step(const MatrixPair& pair, SplitMergeState& state, ConstSpan x, double rho,
                        const LinearSolver& solver, OpCounters* counters) {
  require_same_size(x.size(), pair.size(), "split_merge_step");
  if (!(rho >= 1.0)) throw InvalidArgument("rho must be >= 1");
  return step_from(pair, state, x, matvec(pair.a(), x, counters), rho, solver, counters);
}

SolveTrace run_split_merge(const MatrixPair& pair, const SolverConfig& config, ConstSpan x0) {
  detail::RunContext ctx(pair, config, Method::split_merge, x0);
  const LinearSolver& solver = ctx.linear_solver();
  SplitMergeState st;
  double sigma = std::numeric_limits<double>::quiet_NaN();
  double rho = std::numeric_limits<double>::quiet_NaN();

  Vector x(x0.begin(), x0.end());
  for (std::size_t k = 0;; ++k) {
    Vector ax = matvec(pair.a(), x, ctx.counters());
    if (is_degenerate(dot(x, ax), x)) {
      if (k == 0) throw DegenerateDirection();
      return ctx.finish(Status::degenerate, x);
    }
    if (ctx.record(k, x, ax, {}, true, sigma, rho)) return ctx.finish(Status::converged, x);
    if (ctx.at_cap(k)) return ctx.finish(Status::max_iterations, x);
    Vector next = step_from(pair, st, x, std::move(ax), config.rho, solver, ctx.counters());
    ctx.trace().rho_escalations += st.escalations;
    if (st.power_fallback) ++ctx.trace().power_fallbacks;
    sigma = st.sigma;
    rho = st.rho;
    x = std::move(next);
  }
}

SolveTrace run_power(const MatrixPair& pair, const SolverConfig& config, ConstSpan x0) {
  detail::RunContext ctx(pair, config, Method::power, x0);
  const LinearSolver& solver = ctx.linear_solver();

  Vector x(x0.begin(), x0.end());
  for (std::size_t k = 0;; ++k) {
    Vector ax = matvec(pair.a(), x, ctx.counters());
    const double xax = dot(x, ax);
    if (is_degenerate(xax, x)) {
      if (k == 0) throw DegenerateDirection();
      return ctx.finish(Status::degenerate, x);
    }
    if (ctx.record(k, x, ax, {}, false)) return ctx.finish(Status::converged, x);
    if (ctx.at_cap(k)) return ctx.finish(Status::max_iterations, x);
    scale(1.0 / (2.0 * std::sqrt(xax)), ax);
    x = solve_spd(solver, pair.b(), ax, ctx.counters());
    normalize(x);
  }
}

}  // namespace gep
