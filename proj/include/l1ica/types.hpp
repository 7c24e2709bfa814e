#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace l1ica {

/// Dense real matrix. X (p x N), S (K x N), A (p x K), W (K x K) and Z (K x N)
/// are all carried in this type.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

using Index = Eigen::Index;

/// Raised when a linear-algebra precondition fails numerically (rank
/// deficiency, zero residual after deflation).
class NumericalError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Thrown when Gram-Schmidt leaves nothing of the candidate vector.
class DegenerateDeflation : public NumericalError {
public:
    using NumericalError::NumericalError;
};

inline void require(bool condition, const std::string& message)
{
    if (!condition)
        throw std::invalid_argument(message);
}

inline void require_finite(const Matrix& m, const char* what)
{
    if (!m.allFinite())
        throw NumericalError(std::string(what) + ": non-finite entries");
}

} // namespace l1ica
