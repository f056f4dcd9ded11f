#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string_view>

#include "gep/linalg/cholesky.hpp"
#include "gep/linalg/symmetric_matrix.hpp"
#include "gep/linalg/vector.hpp"

namespace gep {

enum class PreconditionerKind { cholesky, diagonal, incomplete_cholesky, identity };

std::string_view to_string(PreconditionerKind kind);
PreconditionerKind parse_preconditioner_kind(std::string_view name);

// Transform y = P x. Factor kinds hold P = L^T with L lower triangular;
// diagonal and identity kinds hold the diagonal of P.
class Preconditioner {
 public:
  PreconditionerKind kind() const { return kind_; }
  std::size_t size() const { return n_; }
  const std::shared_ptr<const CholeskyFactor>& factor() const { return factor_; }
  std::uint64_t source_fingerprint() const { return fingerprint_; }

  Vector apply(ConstSpan x) const;                    // P x
  Vector apply_transpose(ConstSpan x) const;          // P^T x
  Vector apply_inverse(ConstSpan y) const;            // P^{-1} y
  Vector apply_inverse_transpose(ConstSpan y) const;  // P^{-T} y
  // Cost of one (P^T P)^{-1} application.
  std::uint64_t gram_inverse_flops() const;

  friend Preconditioner build_preconditioner(const SymmetricMatrix& b, PreconditionerKind kind);

 private:
  Preconditioner() = default;

  PreconditionerKind kind_ = PreconditionerKind::identity;
  std::size_t n_ = 0;
  std::shared_ptr<const CholeskyFactor> factor_;
  Vector diag_;
  std::uint64_t fingerprint_ = 0;
};

Preconditioner build_preconditioner(const SymmetricMatrix& b, PreconditionerKind kind);

// (P^T P)^{-1} g. Factor kinds count as one linear solve.
Vector apply_gram_inverse(const Preconditioner& p, ConstSpan g, OpCounters* counters = nullptr);

// ||B - P^T P||_F.
double frobenius_gap(const SymmetricMatrix& b, const Preconditioner& p);

// Power-iteration estimate of lambda_1(P^{-T} B P^{-1}) at relative
// tolerance 1e-4. The transformed matrix is never formed.
double transformed_dominant_eigenvalue(const SymmetricMatrix& b, const Preconditioner& p);

}  // namespace gep
