#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gep/linalg/vector.hpp"

namespace gep {

// Per-run work accumulators. A run owns one instance; nothing here is shared.
struct OpCounters {
  std::uint64_t matvecs = 0;
  std::uint64_t solves = 0;
  std::uint64_t pcg_iterations = 0;
  std::uint64_t flops = 0;

  friend bool operator==(const OpCounters&, const OpCounters&) = default;
};

// A symmetric linear map x -> Mx. Implementations are immutable after
// construction and may be applied from several threads at once.
class SymmetricOperator {
 public:
  virtual ~SymmetricOperator() = default;

  virtual std::size_t size() const = 0;

  // y = M x; y is overwritten. Uncounted.
  virtual void apply(ConstSpan x, MutSpan y) const = 0;

  // Floating point operations of one apply().
  virtual std::uint64_t apply_flops() const = 0;
};

// Counted product: returns Mx and bumps counters->matvecs / flops.
Vector matvec(const SymmetricOperator& m, ConstSpan x, OpCounters* counters = nullptr);

// Full row-major n*n image of an operator, built column by column.
Vector densify(const SymmetricOperator& m);

enum class Storage { dense, sparse };

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

// Symmetric matrix stored either as a packed lower triangle (row-major,
// entry (i,j), j <= i at i*(i+1)/2 + j) or as CSR holding the full mirrored
// pattern with sorted column indices.
class SymmetricMatrix final : public SymmetricOperator {
 public:
  static SymmetricMatrix dense(std::size_t n, Vector packed_lower);
  // Takes a full row-major matrix; throws AsymmetricEntries if
  // |m(i,j) - m(j,i)| > 1e-12 * max(1, |m(i,j)|).
  static SymmetricMatrix from_full(std::size_t n, ConstSpan row_major);
  static SymmetricMatrix identity(std::size_t n);
  static SymmetricMatrix diagonal(ConstSpan d);
  // Entries may come from either triangle; off-diagonal entries are mirrored
  // and duplicates of the same logical entry are summed.
  static SymmetricMatrix from_triplets(std::size_t n, std::span<const Triplet> entries);
  // Validates that the pattern and values are symmetric.
  static SymmetricMatrix csr(std::size_t n, std::vector<std::size_t> row_ptr,
                             std::vector<std::size_t> col_idx, Vector values);

  std::size_t size() const override { return n_; }
  void apply(ConstSpan x, MutSpan y) const override;
  std::uint64_t apply_flops() const override;

  Storage storage() const { return storage_; }
  // Stored entries counting both triangles (n*n for dense storage).
  std::size_t nnz() const;
  double operator()(std::size_t i, std::size_t j) const;

  Vector diagonal() const;
  double trace() const;
  double frobenius_norm() const;
  std::uint64_t fingerprint() const { return fingerprint_; }

  // Calls f(j, value) for every stored entry of row i with j <= i, in
  // increasing j. Dense storage visits all j in [0, i].
  template <typename F>
  void for_each_lower(std::size_t i, F&& f) const {
    if (storage_ == Storage::dense) {
      const std::size_t base = i * (i + 1) / 2;
      for (std::size_t j = 0; j <= i; ++j) f(j, values_[base + j]);
    } else {
      for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1] && col_idx_[p] <= i; ++p) {
        f(col_idx_[p], values_[p]);
      }
    }
  }

  // Nonzero lower-triangle entries in row-major order.
  std::vector<Triplet> lower_triplets() const;
  Vector to_dense() const;

  // this + eta * other.
  SymmetricMatrix plus_scaled(double eta, const SymmetricMatrix& other) const;

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> col_idx() const { return col_idx_; }
  ConstSpan values() const { return values_; }

 private:
  SymmetricMatrix() = default;
  void finalize();

  std::size_t n_ = 0;
  Storage storage_ = Storage::dense;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_idx_;
  Vector values_;
  std::uint64_t fingerprint_ = 0;
};

// 64-bit FNV-1a over (n, lower pattern, entries rounded to 12 significant
// digits). Dense and sparse storage of the same matrix hash identically.
std::uint64_t matrix_fingerprint(const SymmetricMatrix& m);

}  // namespace gep
