#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "gep/solvers.hpp"

namespace gep {

// A' = P A P^T with P = I - B u u^T, applied as one product with A plus two
// rank-one corrections. u'Bu = 1 makes P^T u = 0.
class DeflatedOperator final : public SymmetricOperator {
 public:
  DeflatedOperator(std::shared_ptr<const SymmetricOperator> a, Vector u, Vector bu);

  std::size_t size() const override { return u_.size(); }
  void apply(ConstSpan x, MutSpan y) const override;
  std::uint64_t apply_flops() const override;

  const SymmetricOperator& inner() const { return *a_; }
  const Vector& u() const { return u_; }

 private:
  std::shared_ptr<const SymmetricOperator> a_;
  Vector u_;
  Vector bu_;
};

// Throws NotNormalized unless |u'Bu - 1| <= 1e-10.
std::shared_ptr<const DeflatedOperator> deflate(std::shared_ptr<const SymmetricOperator> a,
                                                const SymmetricMatrix& b, ConstSpan u);

struct EigenPair {
  double lambda = 0.0;
  // B-normalized.
  Vector u;
  // ||Au - lambda Bu|| / (lambda ||Bu||) against the undeflated A.
  double residual = 0.0;
  std::size_t iterations = 0;
  OpCounters counters;
};

struct DeflationState {
  std::shared_ptr<const SymmetricOperator> a;
  std::vector<EigenPair> accepted;
  std::size_t stage = 0;
};

// Stage `stage` (0-based) stopped without converging. Pairs found before it
// are kept.
class StageFailure : public Error {
 public:
  StageFailure(std::size_t stage, Status status, std::vector<EigenPair> partial);

  std::size_t stage() const { return stage_; }
  Status status() const { return status_; }
  const std::vector<EigenPair>& partial() const { return partial_; }

 private:
  std::size_t stage_;
  Status status_;
  std::vector<EigenPair> partial_;
};

// Top-k pairs by k sequential single-vector solves on deflated pairs. Stage
// start vectors are Gaussian draws from mt19937_64(config.seed), made
// B-orthogonal to the accepted vectors. Every stage stops on the
// reference-free residual; config.reference is ignored.
std::vector<EigenPair> top_k(const MatrixPair& pair, std::size_t k, const SolverConfig& config);

}  // namespace gep
