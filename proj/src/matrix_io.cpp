#include "l1ica/matrix_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace l1ica {

namespace {

[[noreturn]] void malformed(const std::string& why)
{
    throw std::runtime_error("malformed matrix file: " + why);
}

double parse_value(const std::string& token, Index row)
{
    const char* begin = token.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (end == begin || errno == ERANGE)
        malformed("bad value '" + token + "' on data row " + std::to_string(row + 1));
    while (*end == ' ' || *end == '\t' || *end == '\r')
        ++end;
    if (*end != '\0')
        malformed("trailing characters in '" + token + "'");
    return v;
}

} // namespace

void write_matrix(std::ostream& out, const Matrix& m)
{
    require_finite(m, "write_matrix");
    out << "# rows=" << m.rows() << " cols=" << m.cols() << '\n';
    char buf[40];
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            const int n = std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            if (j > 0)
                out.put(',');
            out.write(buf, n);
        }
        out.put('\n');
    }
}

Matrix read_matrix(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        malformed("empty input");
    long long rows = 0;
    long long cols = 0;
    if (std::sscanf(line.c_str(), "# rows=%lld cols=%lld", &rows, &cols) != 2)
        malformed("bad header '" + line + "'");
    if (rows < 1 || cols < 1)
        malformed("non-positive dimensions");

    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        if (!std::getline(in, line))
            malformed("expected " + std::to_string(rows) + " data rows, got " + std::to_string(i));
        std::stringstream fields(line);
        std::string token;
        Index j = 0;
        while (std::getline(fields, token, ',')) {
            if (j >= cols)
                malformed("row " + std::to_string(i + 1) + " has more than " + std::to_string(cols) + " values");
            m(i, j++) = parse_value(token, i);
        }
        if (j != cols)
            malformed("row " + std::to_string(i + 1) + " has " + std::to_string(j) + " values, expected " + std::to_string(cols));
    }
    while (std::getline(in, line)) {
        if (!line.empty())
            malformed("extra data after " + std::to_string(rows) + " rows");
    }
    require_finite(m, "read_matrix");
    return m;
}

void save_matrix(const Matrix& m, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_matrix(out, m);
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

Matrix load_matrix(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    return read_matrix(in);
}

} // namespace l1ica
