#include "gep/precond.hpp"

#include <cmath>
#include <string>

#include "gep/linalg/dense_eigen.hpp"

namespace gep {

std::string_view to_string(PreconditionerKind kind) {
  switch (kind) {
    case PreconditionerKind::cholesky:
      return "cholesky";
    case PreconditionerKind::diagonal:
      return "diag";
    case PreconditionerKind::incomplete_cholesky:
      return "ichol";
    case PreconditionerKind::identity:
      return "identity";
  }
  return "identity";
}

PreconditionerKind parse_preconditioner_kind(std::string_view name) {
  if (name == "cholesky") return PreconditionerKind::cholesky;
  if (name == "diag" || name == "diagonal") return PreconditionerKind::diagonal;
  if (name == "ichol" || name == "incomplete-cholesky") return PreconditionerKind::incomplete_cholesky;
  if (name == "identity") return PreconditionerKind::identity;
  throw InvalidArgument("unknown preconditioner '" + std::string(name) + "'");
}

Preconditioner build_preconditioner(const SymmetricMatrix& b, PreconditionerKind kind) {
  Preconditioner p;
  p.kind_ = kind;
  p.n_ = b.size();
  p.fingerprint_ = b.fingerprint();
  switch (kind) {
    case PreconditionerKind::cholesky:
      p.factor_ = std::make_shared<const CholeskyFactor>(cholesky_factorize(b));
      break;
    case PreconditionerKind::incomplete_cholesky:
      p.factor_ = std::make_shared<const CholeskyFactor>(incomplete_cholesky(b));
      break;
    case PreconditionerKind::diagonal: {
      p.diag_ = b.diagonal();
      for (std::size_t i = 0; i < p.n_; ++i) {
        if (!(p.diag_[i] > 0.0)) throw ZeroDiagonal(i);
        p.diag_[i] = std::sqrt(p.diag_[i]);
      }
      break;
    }
    case PreconditionerKind::identity:
      p.diag_.assign(p.n_, 1.0);
      break;
  }
  return p;
}

Vector Preconditioner::apply(ConstSpan x) const {
  require_same_size(x.size(), n_, "preconditioner");
  if (factor_) return factor_->multiply_upper(x);
  Vector y(n_);
  for (std::size_t i = 0; i < n_; ++i) y[i] = diag_[i] * x[i];
  return y;
}

Vector Preconditioner::apply_transpose(ConstSpan x) const {
  require_same_size(x.size(), n_, "preconditioner");
  if (factor_) return factor_->multiply_lower(x);
  return apply(x);
}

Vector Preconditioner::apply_inverse(ConstSpan y) const {
  require_same_size(y.size(), n_, "preconditioner");
  Vector x(y.begin(), y.end());
  if (factor_) {
    factor_->solve_upper(x);
  } else {
    for (std::size_t i = 0; i < n_; ++i) x[i] /= diag_[i];
  }
  return x;
}

Vector Preconditioner::apply_inverse_transpose(ConstSpan y) const {
  require_same_size(y.size(), n_, "preconditioner");
  if (!factor_) return apply_inverse(y);
  Vector x(y.begin(), y.end());
  factor_->solve_lower(x);
  return x;
}

std::uint64_t Preconditioner::gram_inverse_flops() const {
  return factor_ ? factor_->solve_flops() : 2 * static_cast<std::uint64_t>(n_);
}

Vector apply_gram_inverse(const Preconditioner& p, ConstSpan g, OpCounters* counters) {
  require_same_size(g.size(), p.size(), "apply_gram_inverse");
  Vector out;
  if (p.factor()) {
    out = p.factor()->solve(g);
  } else {
    out = p.apply_inverse(p.apply_inverse_transpose(g));
  }
  if (counters) {
    if (p.factor()) ++counters->solves;
    counters->flops += p.gram_inverse_flops();
  }
  return out;
}

double frobenius_gap(const SymmetricMatrix& b, const Preconditioner& p) {
  require_same_size(b.size(), p.size(), "frobenius_gap");
  const std::size_t n = b.size();
  double gap2 = 0.0;
  if (!p.factor()) {
    const Vector d = p.apply(Vector(n, 1.0));
    for (std::size_t i = 0; i < n; ++i) {
      b.for_each_lower(i, [&](std::size_t j, double v) {
        const double r = (j == i) ? v - d[i] * d[i] : v;
        gap2 += (j == i ? 1.0 : 2.0) * r * r;
      });
    }
    return std::sqrt(gap2);
  }

  // Row i of L L^T, lower part: sum over k in row i of L(i,k) * column k of L.
  const CholeskyFactor& l = *p.factor();
  const auto row_ptr = l.row_ptr();
  const auto col_idx = l.col_idx();
  const auto val = l.values();
  std::vector<std::vector<std::pair<std::size_t, double>>> columns(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t q = row_ptr[i]; q < row_ptr[i + 1]; ++q) columns[col_idx[q]].push_back({i, val[q]});
  }
  Vector acc(n, 0.0);
  std::vector<char> touched(n, 0);
  std::vector<std::size_t> list;
  for (std::size_t i = 0; i < n; ++i) {
    list.clear();
    for (std::size_t q = row_ptr[i]; q < row_ptr[i + 1]; ++q) {
      const std::size_t k = col_idx[q];
      for (const auto& [j, ljk] : columns[k]) {
        if (j > i) break;
        if (!touched[j]) {
          touched[j] = 1;
          list.push_back(j);
        }
        acc[j] += val[q] * ljk;
      }
    }
    b.for_each_lower(i, [&](std::size_t j, double v) {
      if (!touched[j]) {
        touched[j] = 1;
        list.push_back(j);
      }
      acc[j] -= v;
    });
    for (std::size_t j : list) {
      gap2 += (j == i ? 1.0 : 2.0) * acc[j] * acc[j];
      acc[j] = 0.0;
      touched[j] = 0;
    }
  }
  return std::sqrt(gap2);
}

double transformed_dominant_eigenvalue(const SymmetricMatrix& b, const Preconditioner& p) {
  require_same_size(b.size(), p.size(), "transformed_dominant_eigenvalue");
  Vector bx(b.size());
  const PowerEstimate est = power_dominant_eigenvalue(
      b.size(),
      [&](ConstSpan y, MutSpan out) {
        const Vector x = p.apply_inverse(y);
        b.apply(x, bx);
        const Vector t = p.apply_inverse_transpose(bx);
        std::copy(t.begin(), t.end(), out.begin());
      },
      1e-4);
  return est.value;
}

}  // namespace gep
