#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "gep/linalg/symmetric_matrix.hpp"
#include "gep/linalg/vector.hpp"

namespace gep {

// Eigenpairs sorted by decreasing eigenvalue; vectors[i] belongs to values[i].
struct EigenDecomposition {
  Vector values;
  std::vector<Vector> vectors;
  std::size_t sweeps = 0;
};

// Cyclic Jacobi on a full row-major symmetric matrix, run until the
// off-diagonal Frobenius norm is <= rel_tol * ||C||_F. Vectors have unit
// Euclidean norm.
EigenDecomposition jacobi_eigen(std::size_t n, ConstSpan row_major, double rel_tol = 1e-12);

// Dense generalized decomposition of (A, B) through C = L^{-1} A L^{-T},
// B = L L^T. Vectors are B-normalized (u'Bu = 1).
EigenDecomposition generalized_eigen(const SymmetricOperator& a, const SymmetricMatrix& b);

struct PowerEstimate {
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Dominant eigenvalue of a symmetric PSD map by power iteration from a seeded
// Gaussian start, stopping when successive Rayleigh estimates agree to
// rel_tol.
PowerEstimate power_dominant_eigenvalue(std::size_t n,
                                        const std::function<void(ConstSpan, MutSpan)>& apply,
                                        double rel_tol, std::uint64_t seed = 0x5eed,
                                        std::size_t max_iterations = 100000);

}  // namespace gep
