#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "run_context.hpp"

namespace gep {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::gd:
      return "gd";
    case Method::pmd:
      return "pmd";
    case Method::power:
      return "power";
    case Method::split_merge:
      return "split-merge";
    case Method::lanczos:
      return "lanczos";
  }
  return "split-merge";
}

Method parse_method(std::string_view name) {
  if (name == "gd") return Method::gd;
  if (name == "pmd") return Method::pmd;
  if (name == "power") return Method::power;
  if (name == "split-merge" || name == "split_merge") return Method::split_merge;
  if (name == "lanczos") return Method::lanczos;
  throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::converged:
      return "converged";
    case Status::max_iterations:
      return "max-iterations";
    case Status::degenerate:
      return "degenerate";
  }
  return "degenerate";
}

StopCheck check_stopping(ConstSpan x, ConstSpan u_ref, double eps) {
  require_same_size(x.size(), u_ref.size(), "check_stopping");
  const double nx = norm2(x);
  const double nu = norm2(u_ref);
  if (nx == 0.0 || nu == 0.0) throw ZeroVector();
  // sqrt(1 - cos^2) evaluated as the norm of the component of x/||x||
  // orthogonal to u, which keeps full relative accuracy for small angles.
  const double c = dot(x, u_ref) / (nx * nu);
  double s2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = x[i] / nx - c * u_ref[i] / nu;
    s2 += r * r;
  }
  const double sin_theta = std::min(1.0, std::sqrt(s2));
  return {sin_theta, sin_theta <= eps};
}

void SolveTrace::write_csv(std::ostream& out, bool include_timing) const {
  out << kTraceHeader << '\n';
  char line[256];
  for (const TraceRecord& r : records) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%" PRIu64 ",%" PRIu64 ",%" PRId64 "\n",
                  r.k, r.f, r.lambda, r.sin_theta, r.matvecs, r.solves,
                  include_timing ? r.elapsed_ns : std::int64_t{0});
    out << line;
  }
}

Vector gaussian_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (double& x : v) x = g(rng);
  return v;
}

SolveTrace run_solver(const MatrixPair& pair, const SolverConfig& config, ConstSpan x0) {
  switch (config.method) {
    case Method::gd:
      return run_gd(pair, config, x0);
    case Method::pmd:
      return run_pmd(pair, config, x0);
    case Method::power:
      return run_power(pair, config, x0);
    case Method::split_merge:
      return run_split_merge(pair, config, x0);
    case Method::lanczos:
      return run_lanczos(pair, config, x0);
  }
  throw InvalidArgument("unknown method");
}

namespace detail {

RunContext::RunContext(const MatrixPair& pair, const SolverConfig& config, Method method,
                       ConstSpan x0)
    : pair_(pair), config_(config), start_(std::chrono::steady_clock::now()) {
  if (!(config.tolerance > 0.0)) throw InvalidArgument("tolerance must be > 0");
  if (config.max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
  if (!(config.rho >= 1.0)) throw InvalidArgument("rho must be >= 1");
  require_same_size(x0.size(), pair.size(), "initial vector");
  if (norm2(x0) == 0.0) throw ZeroVector();
  if (config.reference) {
    require_same_size(config.reference->size(), pair.size(), "reference vector");
    if (norm2(*config.reference) == 0.0) throw ZeroVector();
  }
  if (config.linear_solver) solver_ = config.linear_solver;
  trace_.method = method;
}

const LinearSolver& RunContext::linear_solver() {
  if (!solver_) solver_ = std::make_shared<const LinearSolver>(LinearSolver::exact(pair_.b()));
  return *solver_;
}

bool RunContext::record(std::size_t k, ConstSpan x, ConstSpan ax, ConstSpan bx,
                        bool raw_objective, double sigma, double rho) {
  Vector ax_local, bx_local;
  if (ax.empty()) {
    ax_local = matvec(pair_.a(), x);
    ax = ax_local;
  }
  if (bx.empty()) {
    bx_local = matvec(pair_.b(), x);
    bx = bx_local;
  }
  const double xax = dot(x, ax);
  const double xbx = dot(x, bx);
  const double rq = xax / xbx;

  TraceRecord r;
  r.k = k;
  r.lambda = rq;
  r.f = raw_objective ? objective_value(xax, xbx) : -rq / 4.0;
  if (xax > 0.0 && rq > 0.0) {
    double s2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = ax[i] - rq * bx[i];
      s2 += e * e;
    }
    r.residual = std::sqrt(s2) / (rq * std::sqrt(xax));
  } else {
    r.residual = std::numeric_limits<double>::infinity();
  }
  if (!std::isfinite(r.f)) throw NumericalFailure("non-finite objective at iteration " + std::to_string(k));

  bool converged = false;
  if (config_.reference) {
    const StopCheck s = check_stopping(x, *config_.reference, config_.tolerance);
    r.sin_theta = s.sin_theta;
    converged = s.converged;
  } else {
    converged = r.residual <= config_.tolerance;
  }
  r.matvecs = trace_.counters.matvecs;
  r.solves = trace_.counters.solves;
  r.elapsed_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                     std::chrono::steady_clock::now() - start_)
                     .count();
  r.sigma = sigma;
  r.rho = rho;
  trace_.records.push_back(r);
  if (config_.on_iterate) config_.on_iterate(r, x);
  return converged;
}

SolveTrace RunContext::finish(Status status, ConstSpan x) {
  trace_.status = status;
  trace_.solution.assign(x.begin(), x.end());
  if (status != Status::degenerate) {
    const std::size_t n = x.size();
    Vector ax(n), bx(n);
    pair_.a().apply(x, ax);
    pair_.b().apply(x, bx);
    const double xax = dot(x, ax);
    if (xax > 0.0) scale(optimal_scale(xax, dot(x, bx)), trace_.solution);
  }
  if (!trace_.records.empty()) {
    trace_.lambda = trace_.records.back().lambda;
    trace_.iterations = trace_.records.back().k;
  }
  return std::move(trace_);
}

}  // namespace detail

}  // namespace gep
