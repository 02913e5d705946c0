#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "schwarz/linalg.hpp"

namespace schwarz::io {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// MatrixMarket coordinate format, real field, general or symmetric storage.
// Symmetric files store the lower triangle; reading mirrors it.
SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market(const std::filesystem::path& path);

/// Writes general storage, or the lower triangle when `symmetric` is set.
void write_matrix_market(std::ostream& out, const SparseMatrix& a, bool symmetric = false);
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& a, bool symmetric = false);

// One value per line.
Vector read_vector(std::istream& in);
Vector read_vector(const std::filesystem::path& path);
void write_vector(std::ostream& out, std::span<const double> v);
void write_vector(const std::filesystem::path& path, std::span<const double> v);

}  // namespace schwarz::io
