#include "gep/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gep/linalg/cholesky.hpp"
#include "gep/linalg/dense_eigen.hpp"

namespace gep {

namespace {

constexpr double kDegenerate = 1e-30;
constexpr double kPsdSlack = 1e-10;

// Lower and upper Gershgorin bounds on the spectrum of a stored matrix.
std::pair<double, double> gershgorin(const SymmetricMatrix& m) {
  const std::size_t n = m.size();
  Vector radius(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    m.for_each_lower(i, [&](std::size_t j, double v) {
      if (j == i) return;
      radius[i] += std::fabs(v);
      radius[j] += std::fabs(v);
    });
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = m(i, i);
    lo = std::min(lo, d - radius[i]);
    hi = std::max(hi, d + radius[i]);
  }
  return {lo, hi};
}

double gershgorin_lambda_min(const MatrixPair& pair) {
  const SymmetricMatrix* a = pair.a_matrix();
  if (a == nullptr) throw InvalidArgument("spectrum bound needs a stored A above the dense limit");
  const auto [a_lo, a_hi] = gershgorin(*a);
  const auto [b_lo, b_hi] = gershgorin(pair.b());
  // x'Ax / x'Bx >= a_lo / b_hi when a_lo >= 0, and >= a_lo / b_lo otherwise.
  if (a_lo >= 0.0) return a_lo / b_hi;
  if (b_lo > 0.0) return a_lo / b_lo;
  throw NumericalFailure("B is not diagonally dominant; no Gershgorin bound on lambda_min(A, B)");
}

double lambda_min(const MatrixPair& pair, SpectrumMethod& method) {
  if (pair.size() <= kDenseSpectrumLimit) {
    method = SpectrumMethod::eigensolver;
    return generalized_eigen(pair.a(), pair.b()).values.back();
  }
  method = SpectrumMethod::gershgorin;
  return gershgorin_lambda_min(pair);
}

}  // namespace

MatrixPair::MatrixPair(SymmetricMatrix a, SymmetricMatrix b)
    : MatrixPair(std::make_shared<const SymmetricMatrix>(std::move(a)),
                 std::make_shared<const SymmetricMatrix>(std::move(b))) {}

MatrixPair::MatrixPair(std::shared_ptr<const SymmetricOperator> a,
                       std::shared_ptr<const SymmetricMatrix> b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (!a_ || !b_) throw InvalidArgument("matrix pair needs both A and B");
  require_same_size(a_->size(), b_->size(), "matrix pair");
  a_matrix_ = std::dynamic_pointer_cast<const SymmetricMatrix>(a_);
}

PairDiagnosis validate_pair(const MatrixPair& pair) {
  PairDiagnosis d;
  try {
    cholesky_factorize(pair.b());
    d.b_positive_definite = true;
  } catch (const NotPositiveDefinite& e) {
    d.message = e.what();
    return d;
  }
  try {
    d.lambda_min = lambda_min(pair, d.method);
  } catch (const Error& e) {
    d.message = e.what();
    return d;
  }
  d.a_positive_semidefinite = d.lambda_min >= -kPsdSlack;
  if (!d.a_positive_semidefinite) {
    d.message = "A is not PSD: lambda_min(A, B) = " + std::to_string(d.lambda_min);
  }
  return d;
}

ShiftedPair shift_to_psd(const MatrixPair& pair, double margin) {
  if (!(margin >= 0.0)) throw InvalidArgument("shift margin must be >= 0");
  cholesky_factorize(pair.b());
  SpectrumMethod method{};
  const double lmin = lambda_min(pair, method);
  const double eta = std::max(0.0, -lmin) + margin;
  if (eta == 0.0) return {pair, 0.0};
  const SymmetricMatrix* a = pair.a_matrix();
  if (a == nullptr) throw InvalidArgument("shift_to_psd needs a stored A");
  return {MatrixPair(a->plus_scaled(eta, pair.b()), pair.b()), eta};
}

bool is_degenerate(double xax, ConstSpan x) {
  return !(xax > kDegenerate * dot(x, x));
}

PointEval evaluate_point(const MatrixPair& pair, ConstSpan x, OpCounters* counters) {
  require_same_size(pair.size(), x.size(), "objective");
  PointEval p;
  p.ax = matvec(pair.a(), x, counters);
  p.bx = matvec(pair.b(), x, counters);
  p.xax = dot(x, p.ax);
  p.xbx = dot(x, p.bx);
  return p;
}

double objective_value(double xax, double xbx) {
  return xbx - std::sqrt(std::max(xax, 0.0));
}

double eval_f(const MatrixPair& pair, ConstSpan x, OpCounters* counters) {
  const PointEval p = evaluate_point(pair, x, counters);
  return objective_value(p.xax, p.xbx);
}

Vector gradient_from(const PointEval& p, ConstSpan x) {
  if (is_degenerate(p.xax, x)) throw DegenerateDirection();
  const double inv_root = 1.0 / std::sqrt(p.xax);
  Vector g(x.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 2.0 * p.bx[i] - inv_root * p.ax[i];
  return g;
}

Vector grad_f(const MatrixPair& pair, ConstSpan x, OpCounters* counters) {
  return gradient_from(evaluate_point(pair, x, counters), x);
}

Vector hess_vec(const MatrixPair& pair, ConstSpan x, ConstSpan v, OpCounters* counters) {
  require_same_size(pair.size(), v.size(), "hess_vec");
  const Vector ax = matvec(pair.a(), x, counters);
  const double xax = dot(x, ax);
  if (is_degenerate(xax, x)) throw DegenerateDirection();
  const Vector av = matvec(pair.a(), v, counters);
  const Vector bv = matvec(pair.b(), v, counters);
  const double root = std::sqrt(xax);
  const double rank_one = dot(ax, v) / (xax * root);
  Vector h(v.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    h[i] = 2.0 * bv[i] - av[i] / root + rank_one * ax[i];
  }
  return h;
}

double rayleigh_lambda(const MatrixPair& pair, ConstSpan x) {
  const Vector ax = matvec(pair.a(), x);
  return 2.0 * std::sqrt(std::max(dot(x, ax), 0.0));
}

double rayleigh_quotient(const MatrixPair& pair, ConstSpan x) {
  const PointEval p = evaluate_point(pair, x);
  if (!(p.xbx > 0.0)) throw ZeroVector();
  return p.xax / p.xbx;
}

double optimal_scale(double xax, double xbx) {
  return std::sqrt(std::max(xax, 0.0)) / (2.0 * xbx);
}

CurvatureBound estimate_L_plus(const SymmetricMatrix& b, CurvatureMethod method) {
  if (method == CurvatureMethod::trace) {
    const double tr = b.trace();
    if (!(tr > 0.0)) throw NotPositiveDefinite("trace(B) = " + std::to_string(tr));
    return {2.0 * tr, method};
  }
  const PowerEstimate est = power_dominant_eigenvalue(
      b.size(), [&](ConstSpan x, MutSpan y) { b.apply(x, y); }, 1e-6);
  if (!(est.value > 0.0)) {
    throw NotPositiveDefinite("dominant eigenvalue estimate " + std::to_string(est.value));
  }
  return {2.0 * 1.01 * est.value, method};
}

}  // namespace gep
