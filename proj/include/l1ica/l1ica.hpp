#pragma once

#include "l1ica/fastica.hpp"
#include "l1ica/model.hpp"
#include "l1ica/types.hpp"

#include <Eigen/SparseCore>

#include <cstdint>
#include <optional>

namespace l1ica {

/// Solver knobs for l1-regularised ICA.
struct IcaParams {
    double alpha = 0.0;           // l1 weight
    double kappa = 0.0;           // fraction of zeroed entries per row of Q#
    std::optional<Index> k0;      // overrides kappa when set
    Index max_dc_iter = 500;      // M
    double rho = 1.0;             // ADMM penalty
    double zeta = 1e-5;           // backtracking margin, in (0,1)
    double eta = 2.0;             // Lipschitz rescale factor; values in (0, 1) act as 1/eta
    double lipschitz0 = 1e-3;     // initial Lipschitz guess
    double admm_tol = 1e-6;
    Index admm_max_iter = 10000;
    double dc_tol = 1e-6;
    Index max_backtracks = 60;    // rescalings allowed within one DC step
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument on any out-of-range knob.
    void validate() const;
    Index resolve_k0(Index K) const;
    /// Factor applied to L on a rejected step, always > 1.
    double growth() const { return eta > 1.0 ? eta : 1.0 / eta; }
};

/// J_o(w) = -J_f(w) + alpha ||Q# w||_1.
double cost_Jo(const Vector& w, const Matrix& Z, const NonlinearityTable& table, double alpha, const Matrix& Q_sharp);

/// Gradient of -J_f:
/// -(2/N^2) (sum_j G(w^T z_j) - sum_j G(nu_j)) sum_j z_j G'(w^T z_j).
Vector grad_Jf_tilde(const Vector& w, const Matrix& Z, const NonlinearityTable& table);

/// Gradient of h(w) = (L/2)||w||^2 + J_f(w), i.e. L w - grad_Jf_tilde(w).
Vector subgradient_h(const Vector& w, double L, const Matrix& Z, const NonlinearityTable& table);

/// S_a(x): x - a above a, 0 on [-a, a], x + a below -a.
inline double soft_threshold(double x, double a)
{
    if (x > a)
        return x - a;
    if (x < -a)
        return x + a;
    return 0.0;
}

/// The penalty operator D = Q# of the generalised lasso, with D^T D cached.
/// Stored sparse when at most half its entries are nonzero.
class LassoOperator {
public:
    explicit LassoOperator(const Matrix& Q_sharp);

    Index rows() const { return dense_.rows(); }
    Index cols() const { return dense_.cols(); }
    const Matrix& dense() const { return dense_; }
    const Matrix& gram() const { return gram_; }

    Vector apply(const Vector& w) const;            // D w
    Vector apply_transpose(const Vector& v) const;  // D^T v

private:
    Matrix dense_;
    Eigen::SparseMatrix<double, Eigen::RowMajor> sparse_;
    bool use_sparse_ = false;
    Matrix gram_;
};

struct AdmmSettings {
    double rho = 1.0;
    double tol = 1e-6;
    Index max_iter = 10000;
};

/// Splitting variables carried between solves: gamma ~ D w and the scaled
/// multiplier tau.
struct AdmmState {
    Vector gamma;
    Vector tau;
};

struct AdmmResult {
    Vector w;
    AdmmState state;
    Index iterations = 0;
    bool converged = false;
};

/// Minimise (L/2)||w||^2 + alpha ||D w||_1 - nabla_h^T w by ADMM.
///
/// Each sweep solves (L I + rho D^T D) w = nabla_h + D^T (rho gamma - tau)
/// with a Cholesky factor computed once per call, soft-thresholds
/// D w + tau/rho at alpha/rho, and takes the dual step
/// tau += rho (D w - gamma). Stops once both the primal residual
/// ||D w - gamma|| and the dual residual rho ||D^T (gamma - gamma_prev)|| drop
/// below tol, or at max_iter (converged = false, iterate still returned).
/// alpha == 0 is solved in closed form, w = nabla_h / L.
AdmmResult admm_solve(const Vector& nabla_h, double L, double alpha, const LassoOperator& D,
                      const AdmmSettings& settings, const AdmmState* warm = nullptr);
AdmmResult admm_solve(const Vector& nabla_h, double L, double alpha, const Matrix& Q_sharp,
                      const AdmmSettings& settings, const AdmmState* warm = nullptr);

/// (L/2)||w||^2 + alpha ||Q# w||_1 - nabla_h^T w
double lasso_objective(const Vector& w, const Vector& nabla_h, double L, double alpha, const Matrix& Q_sharp);

/// Sufficient-decrease test J_new <= J_old - (zeta/2) ||w_new - w_old||^2.
bool backtracking_accept(double J_new, double J_old, const Vector& w_new, const Vector& w_old, double zeta);

/// The three terms bounding the orthogonalised step and their maximum C.
struct DescentCertificate {
    double projection = 0.0;        // sqrt(lambda_max(R^T R))
    double penalty = 0.0;           // sqrt(d lambda_max / lambda_min of Q#^T Q#) / ||w||, d = rows of Q#
    double penalty_samples = 0.0;   // same with d replaced by the sample count
    double alignment = 0.0;         // 1 / (cos(nabla_h, w) ||w||); +inf when cos <= 0
    double C = 0.0;
    double C_samples = 0.0;
    bool available = false;         // false when Q#^T Q# is singular
};

/// Evaluate C for the step w_next (before orthogonalisation) taken from
/// nabla_h under the orthogonaliser R. sample_count, when given, fills the
/// *_samples fields. Throws std::invalid_argument on zero-norm w_next or
/// nabla_h.
DescentCertificate descent_certificate(const Matrix& R, const Matrix& Q_sharp, const Vector& w_next,
                                       const Vector& nabla_h, std::optional<Index> sample_count = std::nullopt);

/// Convergence condition: C <= 1 when the inner minimum is positive, C >= 1
/// when it is negative; a zero minimum satisfies it for any C.
bool certificate_condition(double C, double inner_min);

/// Fit l1-regularised ICA by the DC algorithm with deflation.
IcaModel l1ica_fit(const Matrix& X, Index K, const IcaParams& params);

} // namespace l1ica
