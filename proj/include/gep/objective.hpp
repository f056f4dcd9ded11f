#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "gep/linalg/symmetric_matrix.hpp"
#include "gep/linalg/vector.hpp"

namespace gep {

// The pair (A, B): A symmetric PSD, B symmetric PD. A may be an implicit
// operator (deflated stages); B is always stored.
class MatrixPair {
 public:
  MatrixPair(SymmetricMatrix a, SymmetricMatrix b);
  MatrixPair(std::shared_ptr<const SymmetricOperator> a, std::shared_ptr<const SymmetricMatrix> b);

  std::size_t size() const { return b_->size(); }
  const SymmetricOperator& a() const { return *a_; }
  const SymmetricMatrix& b() const { return *b_; }
  // Null when A is not a stored matrix.
  const SymmetricMatrix* a_matrix() const { return a_matrix_.get(); }

  const std::shared_ptr<const SymmetricOperator>& a_ptr() const { return a_; }
  const std::shared_ptr<const SymmetricMatrix>& b_ptr() const { return b_; }

 private:
  std::shared_ptr<const SymmetricOperator> a_;
  std::shared_ptr<const SymmetricMatrix> a_matrix_;
  std::shared_ptr<const SymmetricMatrix> b_;
};

enum class SpectrumMethod { eigensolver, gershgorin };

struct PairDiagnosis {
  bool b_positive_definite = false;
  bool a_positive_semidefinite = false;
  // Smallest generalized eigenvalue of (A, B), or a lower bound for it.
  double lambda_min = 0.0;
  SpectrumMethod method = SpectrumMethod::eigensolver;
  std::string message;
};

// Largest order handled by the dense reference eigensolver in validate_pair
// and shift_to_psd.
inline constexpr std::size_t kDenseSpectrumLimit = 2048;

PairDiagnosis validate_pair(const MatrixPair& pair);

struct ShiftedPair {
  MatrixPair pair;
  double eta = 0.0;
};

// (A + eta B, B) with eta = max(0, -lambda_min(A, B)) + margin. Generalized
// eigenvectors are unchanged; every eigenvalue moves up by eta.
ShiftedPair shift_to_psd(const MatrixPair& pair, double margin);

// Values shared by the objective oracles at one point.
struct PointEval {
  Vector ax;
  Vector bx;
  double xax = 0.0;
  double xbx = 0.0;
};

// Two counted matvecs (A and B).
PointEval evaluate_point(const MatrixPair& pair, ConstSpan x, OpCounters* counters = nullptr);

// x'Bx - (x'Ax)^{1/2}, with x'Ax clamped at 0.
double eval_f(const MatrixPair& pair, ConstSpan x, OpCounters* counters = nullptr);
double objective_value(double xax, double xbx);

// 2Bx - Ax / (x'Ax)^{1/2}. Throws DegenerateDirection if x'Ax <= 1e-30 ||x||^2.
Vector grad_f(const MatrixPair& pair, ConstSpan x, OpCounters* counters = nullptr);
Vector gradient_from(const PointEval& p, ConstSpan x);

// [2B - A/(x'Ax)^{1/2} + (Ax)(Ax)'/(x'Ax)^{3/2}] v.
Vector hess_vec(const MatrixPair& pair, ConstSpan x, ConstSpan v, OpCounters* counters = nullptr);

// 2 (x'Ax)^{1/2}.
double rayleigh_lambda(const MatrixPair& pair, ConstSpan x);
// x'Ax / x'Bx.
double rayleigh_quotient(const MatrixPair& pair, ConstSpan x);
// The c > 0 minimizing f(c x): (x'Ax)^{1/2} / (2 x'Bx).
double optimal_scale(double xax, double xbx);

bool is_degenerate(double xax, ConstSpan x);

enum class CurvatureMethod { dominant_eigenvalue, trace };

struct CurvatureBound {
  double L_plus = 0.0;
  CurvatureMethod method = CurvatureMethod::dominant_eigenvalue;
};

// dominant_eigenvalue: 2 * 1.01 * lambda_hat_1(B) from power iteration at
// relative tolerance 1e-6. trace: 2 * trace(B).
CurvatureBound estimate_L_plus(const SymmetricMatrix& b, CurvatureMethod method);

}  // namespace gep
