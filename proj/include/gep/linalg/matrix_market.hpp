#pragma once

#include <filesystem>
#include <istream>
#include <ostream>

#include "gep/linalg/symmetric_matrix.hpp"

namespace gep {

// MatrixMarket coordinate files with a real or integer field and either the
// symmetric or the general qualifier. The result is always CSR.
SymmetricMatrix read_matrix_market(const std::filesystem::path& path);
SymmetricMatrix parse_matrix_market(std::istream& in);

// Writes `coordinate real symmetric` with the stored lower-triangle entries.
void write_matrix_market(const std::filesystem::path& path, const SymmetricMatrix& m);
void write_matrix_market(std::ostream& out, const SymmetricMatrix& m);

// Dense text format: first line n, then the n(n+1)/2 lower-triangle values
// row-major, whitespace separated.
SymmetricMatrix read_dense_text(const std::filesystem::path& path);
SymmetricMatrix parse_dense_text(std::istream& in);
void write_dense_text(const std::filesystem::path& path, const SymmetricMatrix& m);

// Dispatches on the first non-blank character: '%' means MatrixMarket.
SymmetricMatrix read_matrix(const std::filesystem::path& path);

}  // namespace gep
