#include "gep/linalg/cholesky.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>

namespace gep {

namespace {

constexpr double kPivotFloor = 1e-14;

double max_diagonal(const SymmetricMatrix& b) {
  double m = 0.0;
  for (double v : b.diagonal()) m = std::max(m, v);
  return m;
}

}  // namespace

CholeskyFactor::CholeskyFactor(std::size_t n, std::vector<std::size_t> row_ptr,
                               std::vector<std::size_t> col_idx, Vector values,
                               std::uint64_t source_fingerprint, bool incomplete,
                               double diagonal_shift, std::uint64_t setup_flops)
    : n_(n),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)),
      source_fingerprint_(source_fingerprint),
      incomplete_(incomplete),
      diagonal_shift_(diagonal_shift),
      setup_flops_(setup_flops) {}

void CholeskyFactor::solve_lower(MutSpan x) const {
  require_same_size(x.size(), n_, "triangular solve");
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t last = row_ptr_[i + 1] - 1;
    double s = x[i];
    for (std::size_t p = row_ptr_[i]; p < last; ++p) s -= values_[p] * x[col_idx_[p]];
    x[i] = s / values_[last];
  }
}

void CholeskyFactor::solve_upper(MutSpan x) const {
  require_same_size(x.size(), n_, "triangular solve");
  for (std::size_t i = n_; i-- > 0;) {
    const std::size_t last = row_ptr_[i + 1] - 1;
    const double xi = x[i] / values_[last];
    x[i] = xi;
    for (std::size_t p = row_ptr_[i]; p < last; ++p) x[col_idx_[p]] -= values_[p] * xi;
  }
}

Vector CholeskyFactor::solve(ConstSpan r) const {
  Vector x(r.begin(), r.end());
  solve_lower(x);
  solve_upper(x);
  return x;
}

Vector CholeskyFactor::multiply_lower(ConstSpan x) const {
  require_same_size(x.size(), n_, "triangular product");
  Vector y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) s += values_[p] * x[col_idx_[p]];
    y[i] = s;
  }
  return y;
}

Vector CholeskyFactor::multiply_upper(ConstSpan x) const {
  require_same_size(x.size(), n_, "triangular product");
  Vector y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) y[col_idx_[p]] += values_[p] * x[i];
  }
  return y;
}

Vector CholeskyFactor::to_dense() const {
  Vector out(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) out[i * n_ + col_idx_[p]] = values_[p];
  }
  return out;
}

CholeskyFactor cholesky_factorize(const SymmetricMatrix& b) {
  const std::size_t n = b.size();
  const double floor = kPivotFloor * max_diagonal(b);

  // Row envelope: row i of L spans columns [first[i], i].
  std::vector<std::size_t> first(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t f = i;
    b.for_each_lower(i, [&](std::size_t j, double v) {
      if (v != 0.0 || j == i) f = std::min(f, j);
    });
    first[i] = f;
  }
  std::vector<std::size_t> row_ptr(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) row_ptr[i + 1] = row_ptr[i] + (i - first[i] + 1);
  std::vector<std::size_t> col_idx(row_ptr[n]);
  Vector values(row_ptr[n], 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = first[i]; j <= i; ++j) col_idx[row_ptr[i] + (j - first[i])] = j;
    b.for_each_lower(i, [&](std::size_t j, double v) {
      if (j >= first[i]) values[row_ptr[i] + (j - first[i])] = v;
    });
  }

  std::uint64_t flops = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double* li = values.data() + row_ptr[i];
    const std::size_t fi = first[i];
    for (std::size_t j = fi; j < i; ++j) {
      const double* lj = values.data() + row_ptr[j];
      const std::size_t fj = first[j];
      const std::size_t k0 = std::max(fi, fj);
      double s = li[j - fi];
      for (std::size_t k = k0; k < j; ++k) s -= li[k - fi] * lj[k - fj];
      li[j - fi] = s / lj[j - fj];
      flops += 2 * (j - k0) + 1;
    }
    double d = li[i - fi];
    for (std::size_t k = fi; k < i; ++k) d -= li[k - fi] * li[k - fi];
    flops += 2 * (i - fi) + 1;
    if (!(d > floor) || !(d > 0.0)) {
      throw NotPositiveDefinite("pivot " + std::to_string(d) + " at row " + std::to_string(i));
    }
    li[i - fi] = std::sqrt(d);
  }
  return CholeskyFactor(n, std::move(row_ptr), std::move(col_idx), std::move(values),
                        b.fingerprint(), false, 0.0, flops);
}

namespace {

std::optional<CholeskyFactor> try_ic0(const SymmetricMatrix& b, double gamma) {
  const std::size_t n = b.size();
  const double floor = kPivotFloor * max_diagonal(b) * (1.0 + gamma);

  std::vector<std::size_t> row_ptr(n + 1, 0);
  std::vector<std::size_t> col_idx;
  Vector values;
  for (std::size_t i = 0; i < n; ++i) {
    bool has_diag = false;
    b.for_each_lower(i, [&](std::size_t j, double v) {
      if (j == i) {
        has_diag = true;
        v *= 1.0 + gamma;
      }
      col_idx.push_back(j);
      values.push_back(v);
    });
    if (!has_diag) throw NotPositiveDefinite("missing diagonal entry at row " + std::to_string(i));
    row_ptr[i + 1] = col_idx.size();
  }

  std::uint64_t flops = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ri0 = row_ptr[i];
    const std::size_t ri1 = row_ptr[i + 1] - 1;  // diagonal slot
    for (std::size_t p = ri0; p < ri1; ++p) {
      const std::size_t j = col_idx[p];
      const std::size_t rj1 = row_ptr[j + 1] - 1;
      // Sparse dot of row i and row j over columns < j.
      double s = values[p];
      std::size_t a = ri0;
      std::size_t c = row_ptr[j];
      while (a < p && c < rj1) {
        if (col_idx[a] == col_idx[c]) {
          s -= values[a] * values[c];
          flops += 2;
          ++a;
          ++c;
        } else if (col_idx[a] < col_idx[c]) {
          ++a;
        } else {
          ++c;
        }
      }
      values[p] = s / values[rj1];
      flops += 1;
    }
    double d = values[ri1];
    for (std::size_t p = ri0; p < ri1; ++p) d -= values[p] * values[p];
    flops += 2 * (ri1 - ri0) + 1;
    if (!(d > floor) || !(d > 0.0)) return std::nullopt;
    values[ri1] = std::sqrt(d);
  }
  return CholeskyFactor(n, std::move(row_ptr), std::move(col_idx), std::move(values),
                        b.fingerprint(), true, gamma, flops);
}

}  // namespace

CholeskyFactor incomplete_cholesky(const SymmetricMatrix& b) {
  constexpr std::array<double, 4> shifts{0.0, 1e-3, 1e-2, 1e-1};
  for (double gamma : shifts) {
    if (auto factor = try_ic0(b, gamma)) return std::move(*factor);
  }
  throw NotPositiveDefinite("IC(0) broke down even with a 10% diagonal shift");
}

}  // namespace gep
