#include "l1ica/l1ica.hpp"

#include "l1ica/kernels.hpp"
#include "l1ica/whitening.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <string>

namespace l1ica {

void IcaParams::validate() const
{
    require(std::isfinite(alpha) && alpha >= 0.0, "alpha must be a nonnegative number");
    if (k0)
        require(*k0 >= 1, "k0 must be >= 1");
    else
        require(kappa >= 0.0 && kappa < 1.0, "kappa must lie in [0, 1)");
    require(max_dc_iter >= 1, "max_dc_iter must be >= 1");
    require(rho > 0.0, "rho must be positive");
    require(zeta > 0.0 && zeta < 1.0, "zeta must lie in (0, 1)");
    require(std::isfinite(eta) && eta > 0.0 && eta != 1.0, "eta must be positive and different from 1");
    require(lipschitz0 > 0.0, "initial Lipschitz constant must be positive");
    require(admm_tol > 0.0 && dc_tol > 0.0, "tolerances must be positive");
    require(admm_max_iter >= 1, "admm_max_iter must be >= 1");
    require(max_backtracks >= 0, "max_backtracks must be >= 0");
}

Index IcaParams::resolve_k0(Index K) const
{
    if (k0) {
        require(*k0 >= 1 && *k0 <= K, "k0 must lie in [1, K]");
        return *k0;
    }
    return k0_from_kappa(kappa, K);
}

double cost_Jo(const Vector& w, const Matrix& Z, const NonlinearityTable& table, double alpha, const Matrix& Q_sharp)
{
    require(Q_sharp.cols() == w.size(), "cost_Jo: Q# has " + std::to_string(Q_sharp.cols()) + " columns, w has length "
                                           + std::to_string(w.size()));
    const double penalty = alpha == 0.0 ? 0.0 : alpha * (Q_sharp * w).lpNorm<1>();
    return -negentropy_value(w, Z, table) + penalty;
}

Vector grad_Jf_tilde(const Vector& w, const Matrix& Z, const NonlinearityTable& table)
{
    require(w.size() == Z.rows() && Z.cols() == table.size(), "grad_Jf_tilde: dimension mismatch");
    const auto sums = kernels::projection_sums(Z, w);
    const double n = static_cast<double>(Z.cols());
    return (-2.0 / (n * n)) * (sums.g - table.reference_sum()) * sums.zg1;
}

Vector subgradient_h(const Vector& w, double L, const Matrix& Z, const NonlinearityTable& table)
{
    require(L > 0.0, "subgradient_h: L must be positive");
    return L * w - grad_Jf_tilde(w, Z, table);
}

LassoOperator::LassoOperator(const Matrix& Q_sharp)
    : dense_(Q_sharp), gram_(Q_sharp.transpose() * Q_sharp)
{
    require(Q_sharp.size() > 0, "LassoOperator: empty Q#");
    const auto nnz = (Q_sharp.array() != 0.0).count();
    use_sparse_ = 2 * nnz <= Q_sharp.size();
    if (use_sparse_)
        sparse_ = Q_sharp.sparseView();
}

Vector LassoOperator::apply(const Vector& w) const
{
    if (use_sparse_)
        return sparse_ * w;
    return dense_ * w;
}

Vector LassoOperator::apply_transpose(const Vector& v) const
{
    if (use_sparse_)
        return sparse_.transpose() * v;
    return dense_.transpose() * v;
}

AdmmResult admm_solve(const Vector& nabla_h, double L, double alpha, const LassoOperator& D,
                      const AdmmSettings& settings, const AdmmState* warm)
{
    require(L > 0.0, "admm_solve: L must be positive");
    require(settings.rho > 0.0, "admm_solve: rho must be positive");
    require(alpha >= 0.0, "admm_solve: alpha must be nonnegative");
    require(nabla_h.size() == D.cols(), "admm_solve: nabla_h length does not match Q#");
    const Index K = D.cols();
    const Index p = D.rows();
    const double rho = settings.rho;

    AdmmResult result;
    if (alpha == 0.0) {
        result.w = nabla_h / L;
        result.state.gamma = D.apply(result.w);
        result.state.tau = Vector::Zero(p);
        result.converged = true;
        return result;
    }

    Vector gamma = Vector::Zero(p);
    Vector tau = Vector::Zero(p);
    if (warm && warm->gamma.size() == p && warm->tau.size() == p) {
        gamma = warm->gamma;
        tau = warm->tau;
    }

    Matrix system = rho * D.gram();
    system.diagonal().array() += L;
    const Eigen::LLT<Matrix> factor(system);
    if (factor.info() != Eigen::Success)
        throw NumericalError("admm_solve: system matrix is not positive definite");

    const double threshold = alpha / rho;
    Vector w(K);
    Vector Dw(p);
    Vector gamma_prev(p);
    for (Index it = 1; it <= settings.max_iter; ++it) {
        w = factor.solve(nabla_h + D.apply_transpose(rho * gamma - tau));
        Dw = D.apply(w);
        gamma_prev = gamma;
        for (Index j = 0; j < p; ++j)
            gamma[j] = soft_threshold(Dw[j] + tau[j] / rho, threshold);
        tau += rho * (Dw - gamma);

        const double primal = (Dw - gamma).norm();
        const double dual = rho * D.apply_transpose(gamma - gamma_prev).norm();
        result.iterations = it;
        if (std::max(primal, dual) < settings.tol) {
            result.converged = true;
            break;
        }
    }
    result.w = w;
    result.state.gamma = std::move(gamma);
    result.state.tau = std::move(tau);
    return result;
}

AdmmResult admm_solve(const Vector& nabla_h, double L, double alpha, const Matrix& Q_sharp,
                      const AdmmSettings& settings, const AdmmState* warm)
{
    return admm_solve(nabla_h, L, alpha, LassoOperator(Q_sharp), settings, warm);
}

double lasso_objective(const Vector& w, const Vector& nabla_h, double L, double alpha, const Matrix& Q_sharp)
{
    return 0.5 * L * w.squaredNorm() + alpha * (Q_sharp * w).lpNorm<1>() - nabla_h.dot(w);
}

bool backtracking_accept(double J_new, double J_old, const Vector& w_new, const Vector& w_old, double zeta)
{
    require(zeta > 0.0 && zeta < 1.0, "backtracking_accept: zeta must lie in (0, 1)");
    return J_new <= J_old - 0.5 * zeta * (w_new - w_old).squaredNorm();
}

namespace {

struct GramSpectrum {
    double lo = 0.0;
    double hi = 0.0;
    bool usable = false;
};

GramSpectrum gram_spectrum(const Matrix& gram)
{
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    GramSpectrum s;
    s.lo = eig.eigenvalues().minCoeff();
    s.hi = eig.eigenvalues().maxCoeff();
    s.usable = s.hi > 0.0 && s.lo > 1e-14 * s.hi;
    return s;
}

DescentCertificate certificate_from(double projection_norm, const GramSpectrum& spectrum, Index d,
                                    const Vector& w_next, const Vector& nabla_h, std::optional<Index> samples)
{
    const double wn = w_next.norm();
    const double hn = nabla_h.norm();
    require(wn > 0.0, "descent_certificate: w_next must be nonzero");
    require(hn > 0.0, "descent_certificate: nabla_h must be nonzero");

    DescentCertificate c;
    c.projection = projection_norm;
    const double cosine = nabla_h.dot(w_next) / (hn * wn);
    c.alignment = cosine > 0.0 ? 1.0 / (cosine * wn) : std::numeric_limits<double>::infinity();
    c.available = spectrum.usable;
    if (!c.available) {
        c.penalty = c.penalty_samples = c.C = c.C_samples = std::numeric_limits<double>::quiet_NaN();
        return c;
    }
    const double ratio = spectrum.hi / spectrum.lo;
    c.penalty = std::sqrt(static_cast<double>(d) * ratio) / wn;
    c.C = std::max({c.projection, c.penalty, c.alignment});
    if (samples) {
        c.penalty_samples = std::sqrt(static_cast<double>(*samples) * ratio) / wn;
        c.C_samples = std::max({c.projection, c.penalty_samples, c.alignment});
    } else {
        c.penalty_samples = c.C_samples = std::numeric_limits<double>::quiet_NaN();
    }
    return c;
}

double projection_norm(const Matrix& R)
{
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(R.transpose() * R, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

} // namespace

DescentCertificate descent_certificate(const Matrix& R, const Matrix& Q_sharp, const Vector& w_next,
                                       const Vector& nabla_h, std::optional<Index> sample_count)
{
    const Index K = w_next.size();
    require(R.rows() == K && R.cols() == K, "descent_certificate: R must be K x K");
    require(Q_sharp.cols() == K && nabla_h.size() == K, "descent_certificate: dimension mismatch");
    return certificate_from(projection_norm(R), gram_spectrum(Q_sharp.transpose() * Q_sharp), Q_sharp.rows(), w_next,
                            nabla_h, sample_count);
}

bool certificate_condition(double C, double inner_min)
{
    if (std::isnan(C))
        return false;
    if (inner_min > 0.0)
        return C <= 1.0;
    if (inner_min < 0.0)
        return C >= 1.0;
    return true;
}

IcaModel l1ica_fit(const Matrix& X, Index K, const IcaParams& params)
{
    params.validate();
    const Index k0 = params.resolve_k0(K);

    WhiteningFit white = fit_whitening(X, K);
    attach_sparse_inverse(white.model, k0);
    const Matrix& Z = white.Z;
    const Matrix& Q_sharp = white.model.Q_sharp;
    const LassoOperator D(Q_sharp);
    const GramSpectrum spectrum = gram_spectrum(D.gram());

    const NonlinearityTable table(Z.cols(), params.seed);
    const Matrix W0 = initial_unmixing(K, params.seed);
    const AdmmSettings admm{params.rho, params.admm_tol, params.admm_max_iter};
    const double alpha = params.alpha;

    auto cost = [&](const Vector& w) {
        const double penalty = alpha == 0.0 ? 0.0 : alpha * D.apply(w).lpNorm<1>();
        return -negentropy_value(w, Z, table) + penalty;
    };

    IcaModel model;
    model.seed = params.seed;
    model.W = Matrix::Zero(K, K);
    model.components.resize(static_cast<std::size_t>(K));

    for (Index i = 0; i < K; ++i) {
        auto& diag = model.components[static_cast<std::size_t>(i)];
        const auto prior = model.W.leftCols(i);
        // R_i = I - sum_{j<i} w_j w_j^T; its spectral norm is 1 unless i == 0
        // (R = I, also 1).
        const double r_norm = 1.0;

        Vector w = detail::deflated_start(W0.col(i), model.W, i, params.seed, diag);
        double J = cost(w);
        double L = params.lipschitz0;
        AdmmState warm{D.apply(w), Vector::Zero(D.rows())};
        diag.cost_trace.push_back(J);

        for (Index t = 0; t < params.max_dc_iter; ++t) {
            const Vector grad = grad_Jf_tilde(w, Z, table);
            bool accepted = false;
            Vector nabla_h;
            Vector w_hat;
            double J_new = 0.0;
            AdmmResult step;
            double candidate_move = std::numeric_limits<double>::infinity();
            for (Index bt = 0;; ++bt) {
                nabla_h = L * w - grad;
                step = admm_solve(nabla_h, L, alpha, D, admm, &warm);
                diag.admm_iterations += step.iterations;
                Vector r = step.w;
                // Gram-Schmidt projection, applied twice to keep W orthonormal to
                // rounding when most of step.w lies in the prior span.
                for (int pass = 0; pass < 2 && i > 0; ++pass)
                    r -= prior * (prior.transpose() * r);
                const double rn = r.norm();
                if (rn >= 1e-12 && std::isfinite(rn)) {
                    w_hat = r / rn;
                    J_new = cost(w_hat);
                    candidate_move = (w_hat - w).norm();
                    if (backtracking_accept(J_new, J, w_hat, w, params.zeta)) {
                        accepted = true;
                        break;
                    }
                }
                if (bt >= params.max_backtracks)
                    break;
                L *= params.growth();
                diag.backtracks += 1;
            }
            if (!accepted) {
                // No decrease even for a vanishing step: w is stationary to
                // rounding unless the last candidate still moved.
                diag.converged = candidate_move < params.dc_tol;
                break;
            }

            CertificateRecord record;
            if (step.w.norm() > 0.0 && nabla_h.norm() > 0.0) {
                const auto c = certificate_from(r_norm, spectrum, D.rows(), step.w, nabla_h, Z.cols());
                record.C = c.C;
                record.C_samples = c.C_samples;
                record.available = c.available;
                record.inner_min = lasso_objective(step.w, nabla_h, L, alpha, Q_sharp);
                record.condition_holds = c.available && certificate_condition(c.C, record.inner_min);
            }
            diag.certificates.push_back(record);

            const double moved = (w_hat - w).norm();
            w = w_hat;
            J = J_new;
            warm = std::move(step.state);
            diag.cost_trace.push_back(J);
            diag.iterations = t + 1;
            if (moved < params.dc_tol) {
                diag.converged = true;
                break;
            }
        }

        model.W.col(i) = w;
        diag.final_cost = J;
        diag.final_negentropy = negentropy_value(w, Z, table);
        diag.lipschitz = L;
    }

    model.A = Q_sharp * model.W;
    model.S = model.W.transpose() * Z;
    model.whitening = std::move(white.model);
    return model;
}

} // namespace l1ica
