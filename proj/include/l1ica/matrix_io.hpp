#pragma once

#include "l1ica/types.hpp"

#include <filesystem>
#include <iosfwd>

namespace l1ica {

// Text matrix format:
//   # rows=<r> cols=<c>
//   r lines of c comma-separated values, 17 significant digits, LF endings.

void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in);

void save_matrix(const Matrix& m, const std::filesystem::path& path);
Matrix load_matrix(const std::filesystem::path& path);

} // namespace l1ica
