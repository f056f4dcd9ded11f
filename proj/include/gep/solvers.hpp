#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "gep/linalg/linear_solver.hpp"
#include "gep/objective.hpp"
#include "gep/precond.hpp"

namespace gep {

enum class Method { gd, pmd, power, split_merge, lanczos };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

// Stepsize policy. Sampled bounds are fractions of the largest admissible
// stepsize: 2/L+ for GD, 1/lambda_1(B~) for PMD. One draw per run.
struct Stepsize {
  enum class Policy { fixed, sampled };
  Policy policy = Policy::sampled;
  double value = 0.0;
  double lo = 0.9;
  double hi = 0.99;

  static Stepsize fixed(double alpha) { return {Policy::fixed, alpha, 0.0, 0.0}; }
  static Stepsize sampled(double lo, double hi) { return {Policy::sampled, 0.0, lo, hi}; }
};

struct LanczosOptions {
  std::size_t cycle_length = 20;
  bool reorthogonalize = true;
  // Record max |V'BV - I| at the end of every cycle.
  bool track_orthogonality = false;
};

struct TraceRecord {
  std::size_t k = 0;
  double f = 0.0;
  double lambda = 0.0;
  double sin_theta = std::numeric_limits<double>::quiet_NaN();
  // ||Ax - lambda Bx|| / (lambda (x'Ax)^{1/2}), the reference-free criterion.
  double residual = 0.0;
  std::uint64_t matvecs = 0;
  std::uint64_t solves = 0;
  std::int64_t elapsed_ns = 0;
  // Split-Merge only: sigma and rho of the step that produced x_k.
  double sigma = std::numeric_limits<double>::quiet_NaN();
  double rho = std::numeric_limits<double>::quiet_NaN();
};

using IterateCallback = std::function<void(const TraceRecord&, ConstSpan x)>;

struct SolverConfig {
  Method method = Method::split_merge;
  Stepsize stepsize;
  double rho = 1.0;
  double tolerance = 1e-5;
  std::size_t max_iterations = 100000;
  std::uint64_t seed = 0;
  // Null means an exact Cholesky solver is built from B for the run.
  std::shared_ptr<const LinearSolver> linear_solver;
  // PMD only. Null means the Cholesky preconditioner.
  std::shared_ptr<const Preconditioner> preconditioner;
  CurvatureMethod curvature = CurvatureMethod::dominant_eigenvalue;
  LanczosOptions lanczos;
  // Stop on sin(theta) against this vector; without it stop on the residual.
  std::optional<Vector> reference;
  IterateCallback on_iterate;
};

enum class Status { converged, max_iterations, degenerate };

std::string_view to_string(Status status);

struct SolveTrace {
  Method method = Method::split_merge;
  std::vector<TraceRecord> records;
  Status status = Status::max_iterations;
  // Final iterate rescaled to the minimizer of f along its direction, so
  // rayleigh_lambda(solution) equals lambda.
  Vector solution;
  // Rayleigh quotient of the final iterate.
  double lambda = 0.0;
  std::size_t iterations = 0;
  OpCounters counters;
  double stepsize = std::numeric_limits<double>::quiet_NaN();
  std::size_t rho_escalations = 0;
  std::size_t power_fallbacks = 0;
  std::vector<double> orthogonality_drift;

  bool converged() const { return status == Status::converged; }
  const TraceRecord& last() const { return records.back(); }
  void write_csv(std::ostream& out, bool include_timing = true) const;
};

inline constexpr std::string_view kTraceHeader = "k,f,lambda,sin_theta,matvecs,solves,elapsed_ns";

struct StopCheck {
  double sin_theta = 0.0;
  bool converged = false;
};

// Euclidean angle between x and u_ref.
StopCheck check_stopping(ConstSpan x, ConstSpan u_ref, double eps);

// Coefficients and cached products of one Split-Merge step.
struct SplitMergeState {
  double zeta = 0.0;
  double omega = 0.0;
  double sigma = 0.0;
  double delta = 0.0;
  double rho = 1.0;  // rho actually used, after any doubling
  std::size_t escalations = 0;
  bool power_fallback = false;
  double xax = 0.0;      // x'Ax
  double xabax = 0.0;    // x'AB^{-1}Ax
  double xababax = 0.0;  // x'AB^{-1}AB^{-1}Ax
  Vector ax;             // Ax
  Vector binv_ax;        // B^{-1}Ax
  Vector ab_ax;          // AB^{-1}Ax
  Vector z;
};

inline constexpr std::size_t kMaxRhoDoublings = 30;

// One step: two solves with B, two products with A, four inner products.
Vector split_merge_step(const MatrixPair& pair, SplitMergeState& state, ConstSpan x, double rho,
                        const LinearSolver& solver, OpCounters* counters = nullptr);

SolveTrace run_gd(const MatrixPair& pair, const SolverConfig& config, ConstSpan x0);
SolveTrace run_pmd(const MatrixPair& pair, const SolverConfig& config, ConstSpan x0);
SolveTrace run_power(const MatrixPair& pair, const SolverConfig& config, ConstSpan x0);
SolveTrace run_split_merge(const MatrixPair& pair, const SolverConfig& config, ConstSpan x0);
SolveTrace run_lanczos(const MatrixPair& pair, const SolverConfig& config, ConstSpan x0);

// Dispatches on config.method.
SolveTrace run_solver(const MatrixPair& pair, const SolverConfig& config, ConstSpan x0);

Vector gaussian_vector(std::size_t n, std::mt19937_64& rng);

}  // namespace gep
