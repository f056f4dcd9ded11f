#pragma once

#include <chrono>
#include <limits>

#include "gep/solvers.hpp"

namespace gep::detail {

// Per-run bookkeeping shared by all methods: argument validation, trace
// records, the stopping rule and the final status.
class RunContext {
 public:
  RunContext(const MatrixPair& pair, const SolverConfig& config, Method method, ConstSpan x0);

  OpCounters* counters() { return &trace_.counters; }
  SolveTrace& trace() { return trace_; }
  const SolverConfig& config() const { return config_; }
  const MatrixPair& pair() const { return pair_; }

  // Records iterate x_k and reports whether the stopping rule holds. Empty
  // ax / bx are recomputed without touching the counters. raw_objective
  // selects f(x_k) over the scale-free -RQ/4.
  bool record(std::size_t k, ConstSpan x, ConstSpan ax, ConstSpan bx, bool raw_objective,
              double sigma = std::numeric_limits<double>::quiet_NaN(),
              double rho = std::numeric_limits<double>::quiet_NaN());

  bool at_cap(std::size_t k) const { return k >= config_.max_iterations; }

  SolveTrace finish(Status status, ConstSpan x);

  // The configured solver, or an exact one built on first use.
  const LinearSolver& linear_solver();

 private:
  const MatrixPair& pair_;
  const SolverConfig& config_;
  SolveTrace trace_;
  std::shared_ptr<const LinearSolver> solver_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace gep::detail
