#pragma once

#include "sfe/core.hpp"

#include <string>

// Dense matrix/vector file I/O. Two formats:
//  - CSV: header-free, one row per line, comma-separated doubles.
//  - MatrixMarket dense array ("%%MatrixMarket matrix array real general"),
//    values in column-major order.
// Doubles are parsed and written at full round-trip precision.

namespace sfe {

Matrix read_csv_matrix(const std::string& path);
Matrix read_matrix_market(const std::string& path);

// Dispatches on extension: .mtx / .mm -> MatrixMarket, anything else CSV.
Matrix read_matrix(const std::string& path);

// A vector file is a matrix with one column or one row.
Vector read_vector(const std::string& path);

void write_csv_matrix(const Matrix& A, const std::string& path);
void write_matrix_market(const Matrix& A, const std::string& path);

}  // namespace sfe
