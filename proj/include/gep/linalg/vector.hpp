#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gep/errors.hpp"

namespace gep {

using Vector = std::vector<double>;
using ConstSpan = std::span<const double>;
using MutSpan = std::span<double>;

inline void require_same_size(std::size_t a, std::size_t b, const char* where) {
  if (a != b) {
    throw DimensionMismatch(std::string(where) + " (" + std::to_string(a) +
                            " vs " + std::to_string(b) + ")");
  }
}

inline double dot(ConstSpan x, ConstSpan y) {
  require_same_size(x.size(), y.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm2(ConstSpan x) { return std::sqrt(dot(x, x)); }

// y += a * x
inline void axpy(double a, ConstSpan x, MutSpan y) {
  require_same_size(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline void scale(double a, MutSpan x) {
  for (double& v : x) v *= a;
}

inline Vector scaled(double a, ConstSpan x) {
  Vector out(x.begin(), x.end());
  scale(a, out);
  return out;
}

// Scales x to unit Euclidean norm and returns the previous norm.
inline double normalize(MutSpan x) {
  const double nrm = norm2(x);
  if (nrm == 0.0) throw ZeroVector();
  scale(1.0 / nrm, x);
  return nrm;
}

inline double max_abs(ConstSpan x) {
  double m = 0.0;
  for (double v : x) m = std::fmax(m, std::fabs(v));
  return m;
}

}  // namespace gep
