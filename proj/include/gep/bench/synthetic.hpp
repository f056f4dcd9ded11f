#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "gep/linalg/dense_eigen.hpp"
#include "gep/objective.hpp"

namespace gep {

struct SyntheticSpec {
  std::size_t n = 64;
  double kappa_a = 100.0;
  double kappa_b = 10.0;
  std::uint64_t seed = 0;
};

// n values evenly spaced over [1/kappa, 1], increasing.
Vector even_spectrum(std::size_t n, double kappa);

// Q from Gram-Schmidt on an n x n standard normal matrix; row-major.
Vector random_orthogonal(std::size_t n, std::mt19937_64& rng);

// A = Q_A D_A Q_A', B = Q_B D_B Q_B' with Q_A drawn before Q_B from one
// seeded stream. A constant spectrum yields the identity exactly.
MatrixPair gen_synthetic(const SyntheticSpec& spec);

struct ReferenceSolution {
  double lambda = 0.0;
  // B-normalized.
  Vector u;
  // ||Au - lambda Bu|| / (lambda ||Bu||).
  double residual = 0.0;
  bool dense = true;
};

inline constexpr std::size_t kReferenceDenseLimit = 4096;

// Dense Jacobi path up to kReferenceDenseLimit, Split-Merge at tolerance
// 1e-10 in reference-free mode above. Throws NumericalFailure if the residual
// certificate 1e-8 is not met.
ReferenceSolution reference_solution(const MatrixPair& pair);

}  // namespace gep
