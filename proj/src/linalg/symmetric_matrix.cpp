#include "gep/linalg/symmetric_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gep {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_mix(std::uint64_t& h, std::uint64_t word) {
  for (int b = 0; b < 8; ++b) {
    h ^= (word >> (8 * b)) & 0xffU;
    h *= kFnvPrime;
  }
}

// (decimal exponent, 12-digit mantissa) of v.
std::pair<std::int64_t, std::int64_t> round_12_digits(double v) {
  if (v == 0.0 || !std::isfinite(v)) return {0, 0};
  const auto e = static_cast<std::int64_t>(std::floor(std::log10(std::fabs(v))));
  const double mantissa = v / std::pow(10.0, static_cast<double>(e - 11));
  return {e, static_cast<std::int64_t>(std::llround(mantissa))};
}

bool nearly_equal(double a, double b) {
  return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(a));
}

}  // namespace

Vector matvec(const SymmetricOperator& m, ConstSpan x, OpCounters* counters) {
  require_same_size(m.size(), x.size(), "matvec");
  Vector y(x.size());
  m.apply(x, y);
  if (counters != nullptr) {
    counters->matvecs += 1;
    counters->flops += m.apply_flops();
  }
  return y;
}

Vector densify(const SymmetricOperator& m) {
  const std::size_t n = m.size();
  Vector out(n * n);
  Vector e(n, 0.0);
  Vector col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    m.apply(e, col);
    e[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) out[i * n + j] = col[i];
  }
  return out;
}

SymmetricMatrix SymmetricMatrix::dense(std::size_t n, Vector packed_lower) {
  if (n == 0) throw InvalidArgument("matrix order must be positive");
  require_same_size(packed_lower.size(), n * (n + 1) / 2, "packed lower triangle");
  SymmetricMatrix m;
  m.n_ = n;
  m.storage_ = Storage::dense;
  m.values_ = std::move(packed_lower);
  m.finalize();
  return m;
}

SymmetricMatrix SymmetricMatrix::from_full(std::size_t n, ConstSpan row_major) {
  require_same_size(row_major.size(), n * n, "full matrix");
  Vector packed(n * (n + 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double lo = row_major[i * n + j];
      const double up = row_major[j * n + i];
      if (!nearly_equal(lo, up)) {
        throw AsymmetricEntries("(" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
      packed[i * (i + 1) / 2 + j] = lo;
    }
  }
  return dense(n, std::move(packed));
}

SymmetricMatrix SymmetricMatrix::identity(std::size_t n) {
  return diagonal(Vector(n, 1.0));
}

SymmetricMatrix SymmetricMatrix::diagonal(ConstSpan d) {
  const std::size_t n = d.size();
  std::vector<std::size_t> row_ptr(n + 1);
  std::vector<std::size_t> col_idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    row_ptr[i + 1] = i + 1;
    col_idx[i] = i;
  }
  return csr(n, std::move(row_ptr), std::move(col_idx), Vector(d.begin(), d.end()));
}

SymmetricMatrix SymmetricMatrix::from_triplets(std::size_t n, std::span<const Triplet> entries) {
  if (n == 0) throw InvalidArgument("matrix order must be positive");
  std::vector<Triplet> all;
  all.reserve(entries.size() * 2);
  for (const Triplet& t : entries) {
    if (t.row >= n || t.col >= n) {
      throw InvalidArgument("entry (" + std::to_string(t.row) + "," + std::to_string(t.col) +
                            ") outside a matrix of order " + std::to_string(n));
    }
    all.push_back(t);
    if (t.row != t.col) all.push_back({t.col, t.row, t.value});
  }
  std::sort(all.begin(), all.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  std::vector<std::size_t> row_ptr(n + 1, 0);
  std::vector<std::size_t> col_idx;
  Vector values;
  col_idx.reserve(all.size());
  values.reserve(all.size());
  for (std::size_t p = 0; p < all.size(); ++p) {
    if (!col_idx.empty() && p > 0 && all[p].row == all[p - 1].row &&
        all[p].col == all[p - 1].col) {
      values.back() += all[p].value;
      continue;
    }
    col_idx.push_back(all[p].col);
    values.push_back(all[p].value);
    row_ptr[all[p].row + 1] += 1;
  }
  for (std::size_t i = 0; i < n; ++i) row_ptr[i + 1] += row_ptr[i];
  return csr(n, std::move(row_ptr), std::move(col_idx), std::move(values));
}

SymmetricMatrix SymmetricMatrix::csr(std::size_t n, std::vector<std::size_t> row_ptr,
                                     std::vector<std::size_t> col_idx, Vector values) {
  if (n == 0) throw InvalidArgument("matrix order must be positive");
  require_same_size(row_ptr.size(), n + 1, "csr row pointer");
  require_same_size(col_idx.size(), values.size(), "csr columns/values");
  if (row_ptr.front() != 0 || row_ptr.back() != col_idx.size()) {
    throw InvalidArgument("csr row pointer does not span the entry arrays");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (row_ptr[i] > row_ptr[i + 1]) throw InvalidArgument("csr row pointer not monotone");
    for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      if (col_idx[p] >= n) throw InvalidArgument("csr column index out of range");
      if (p > row_ptr[i] && col_idx[p] <= col_idx[p - 1]) {
        throw InvalidArgument("csr columns must be strictly increasing within a row");
      }
    }
  }

  SymmetricMatrix m;
  m.n_ = n;
  m.storage_ = Storage::sparse;
  m.row_ptr_ = std::move(row_ptr);
  m.col_idx_ = std::move(col_idx);
  m.values_ = std::move(values);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = m.row_ptr_[i]; p < m.row_ptr_[i + 1]; ++p) {
      const std::size_t j = m.col_idx_[p];
      if (j == i) continue;
      const auto first = m.col_idx_.begin() + static_cast<std::ptrdiff_t>(m.row_ptr_[j]);
      const auto last = m.col_idx_.begin() + static_cast<std::ptrdiff_t>(m.row_ptr_[j + 1]);
      const auto it = std::lower_bound(first, last, i);
      if (it == last || *it != i) {
        throw AsymmetricEntries("entry (" + std::to_string(i) + "," + std::to_string(j) +
                                ") has no mirror");
      }
      const double mirror = m.values_[static_cast<std::size_t>(it - m.col_idx_.begin())];
      if (!nearly_equal(m.values_[p], mirror)) {
        throw AsymmetricEntries("(" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  m.finalize();
  return m;
}

void SymmetricMatrix::finalize() { fingerprint_ = matrix_fingerprint(*this); }

void SymmetricMatrix::apply(ConstSpan x, MutSpan y) const {
  require_same_size(x.size(), n_, "matvec input");
  require_same_size(y.size(), n_, "matvec output");
  if (storage_ == Storage::dense) {
    std::fill(y.begin(), y.end(), 0.0);
    const double* a = values_.data();
    for (std::size_t i = 0; i < n_; ++i) {
      const double xi = x[i];
      double acc = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        acc += a[j] * x[j];
        y[j] += a[j] * xi;
      }
      y[i] += acc + a[i] * xi;
      a += i + 1;
    }
    return;
  }
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) acc += values_[p] * x[col_idx_[p]];
    y[i] = acc;
  }
}

std::uint64_t SymmetricMatrix::apply_flops() const { return 2 * static_cast<std::uint64_t>(nnz()); }

std::size_t SymmetricMatrix::nnz() const {
  return storage_ == Storage::dense ? n_ * n_ : values_.size();
}

double SymmetricMatrix::operator()(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw InvalidArgument("entry index out of range");
  if (storage_ == Storage::dense) {
    if (j > i) std::swap(i, j);
    return values_[i * (i + 1) / 2 + j];
  }
  const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

Vector SymmetricMatrix::diagonal() const {
  Vector d(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) d[i] = (*this)(i, i);
  return d;
}

double SymmetricMatrix::trace() const {
  double t = 0.0;
  for (double v : diagonal()) t += v;
  return t;
}

double SymmetricMatrix::frobenius_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for_each_lower(i, [&](std::size_t j, double v) { s += (j == i ? 1.0 : 2.0) * v * v; });
  }
  return std::sqrt(s);
}

std::vector<Triplet> SymmetricMatrix::lower_triplets() const {
  std::vector<Triplet> out;
  for (std::size_t i = 0; i < n_; ++i) {
    for_each_lower(i, [&](std::size_t j, double v) {
      if (v != 0.0) out.push_back({i, j, v});
    });
  }
  return out;
}

Vector SymmetricMatrix::to_dense() const {
  Vector out(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for_each_lower(i, [&](std::size_t j, double v) {
      out[i * n_ + j] = v;
      out[j * n_ + i] = v;
    });
  }
  return out;
}

SymmetricMatrix SymmetricMatrix::plus_scaled(double eta, const SymmetricMatrix& other) const {
  require_same_size(n_, other.n_, "matrix sum");
  if (storage_ == Storage::dense && other.storage_ == Storage::dense) {
    Vector packed = values_;
    for (std::size_t k = 0; k < packed.size(); ++k) packed[k] += eta * other.values_[k];
    return dense(n_, std::move(packed));
  }
  if (storage_ == Storage::dense || other.storage_ == Storage::dense) {
    Vector packed(n_ * (n_ + 1) / 2, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t base = i * (i + 1) / 2;
      for_each_lower(i, [&](std::size_t j, double v) { packed[base + j] += v; });
      other.for_each_lower(i, [&](std::size_t j, double v) { packed[base + j] += eta * v; });
    }
    return dense(n_, std::move(packed));
  }
  std::vector<Triplet> entries;
  for (std::size_t i = 0; i < n_; ++i) {
    for_each_lower(i, [&](std::size_t j, double v) { entries.push_back({i, j, v}); });
    other.for_each_lower(i, [&](std::size_t j, double v) { entries.push_back({i, j, eta * v}); });
  }
  return from_triplets(n_, entries);
}

std::uint64_t matrix_fingerprint(const SymmetricMatrix& m) {
  std::uint64_t h = kFnvOffset;
  fnv_mix(h, m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    m.for_each_lower(i, [&](std::size_t j, double v) {
      const auto [e, mant] = round_12_digits(v);
      if (mant == 0) return;
      fnv_mix(h, i);
      fnv_mix(h, j);
      fnv_mix(h, static_cast<std::uint64_t>(e));
      fnv_mix(h, static_cast<std::uint64_t>(mant));
    });
  }
  return h;
}

}  // namespace gep
