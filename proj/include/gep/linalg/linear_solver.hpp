#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>

#include "gep/linalg/cholesky.hpp"
#include "gep/linalg/symmetric_matrix.hpp"
#include "gep/linalg/vector.hpp"

namespace gep {

enum class SolveMode { exact, pcg };

enum class PcgInner { none, jacobi, ichol };

struct PcgOptions {
  std::size_t max_iterations = 30;
  // Stop once ||r_k|| <= tolerance * ||r_0||.
  double tolerance = 1e-10;
  PcgInner inner = PcgInner::jacobi;
};

// Strategy for Bz = r. Immutable once built, so one instance can serve many
// concurrent runs against the same B.
class LinearSolver {
 public:
  static LinearSolver exact(const SymmetricMatrix& b);
  static LinearSolver exact(std::shared_ptr<const CholeskyFactor> factor);
  static LinearSolver pcg(const SymmetricMatrix& b, PcgOptions options = {});

  SolveMode mode() const { return mode_; }
  const PcgOptions& pcg_options() const { return options_; }
  // Null in pcg mode unless the inner preconditioner is IC(0).
  const std::shared_ptr<const CholeskyFactor>& factor() const { return factor_; }
  std::uint64_t fingerprint() const { return fingerprint_; }
  // Flops spent building the solver (factorization, if any).
  std::uint64_t setup_flops() const;

  Vector solve(const SymmetricMatrix& b, ConstSpan r, OpCounters* counters) const;

 private:
  LinearSolver() = default;
  Vector solve_pcg(const SymmetricMatrix& b, ConstSpan r, OpCounters* counters) const;

  SolveMode mode_ = SolveMode::exact;
  PcgOptions options_;
  std::shared_ptr<const CholeskyFactor> factor_;
  Vector inverse_diagonal_;
  std::uint64_t fingerprint_ = 0;
};

// z ~= B^{-1} r. Bumps counters->solves once per call; pcg mode also adds
// the inner iteration count.
Vector solve_spd(const LinearSolver& solver, const SymmetricMatrix& b, ConstSpan r,
                 OpCounters* counters = nullptr);

}  // namespace gep
