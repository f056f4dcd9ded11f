#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gep/linalg/symmetric_matrix.hpp"
#include "gep/linalg/vector.hpp"

namespace gep {

// Lower-triangular factor L with L L^T ~= B, stored row-compressed. Column
// indices are strictly increasing within a row and the diagonal entry is the
// last entry of every row.
class CholeskyFactor {
 public:
  CholeskyFactor(std::size_t n, std::vector<std::size_t> row_ptr,
                 std::vector<std::size_t> col_idx, Vector values,
                 std::uint64_t source_fingerprint, bool incomplete,
                 double diagonal_shift, std::uint64_t setup_flops);

  std::size_t size() const { return n_; }
  std::size_t nnz() const { return values_.size(); }
  bool incomplete() const { return incomplete_; }
  // Relative shift gamma of the diagonal that was needed (IC restarts only).
  double diagonal_shift() const { return diagonal_shift_; }
  std::uint64_t source_fingerprint() const { return source_fingerprint_; }
  std::uint64_t setup_flops() const { return setup_flops_; }
  // One forward plus one backward substitution.
  std::uint64_t solve_flops() const { return 4 * static_cast<std::uint64_t>(nnz()); }

  double diag(std::size_t i) const { return values_[row_ptr_[i + 1] - 1]; }

  // In place: x <- L^{-1} x.
  void solve_lower(MutSpan x) const;
  // In place: x <- L^{-T} x.
  void solve_upper(MutSpan x) const;
  // (L L^T)^{-1} r.
  Vector solve(ConstSpan r) const;

  Vector multiply_lower(ConstSpan x) const;  // L x
  Vector multiply_upper(ConstSpan x) const;  // L^T x

  // Full row-major n*n copy of L.
  Vector to_dense() const;

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> col_idx() const { return col_idx_; }
  ConstSpan values() const { return values_; }

 private:
  std::size_t n_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_idx_;
  Vector values_;
  std::uint64_t source_fingerprint_;
  bool incomplete_;
  double diagonal_shift_;
  std::uint64_t setup_flops_;
};

// Exact factorization. Fill is confined to the row envelope of B (dense input
// gives a full lower triangle). Throws NotPositiveDefinite when a pivot is
// <= 1e-14 * max_i b_ii.
CholeskyFactor cholesky_factorize(const SymmetricMatrix& b);

// IC(0): the factor keeps exactly the stored lower pattern of B. On pivot
// breakdown restarts on B + gamma * diag(B) for gamma in {1e-3, 1e-2, 1e-1},
// then throws NotPositiveDefinite.
CholeskyFactor incomplete_cholesky(const SymmetricMatrix& b);

}  // namespace gep
